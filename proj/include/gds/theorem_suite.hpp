#pragma once

// Randomized verification of the identities and inequalities the library
// relies on, run in exact arithmetic on small instances.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gds/dataset_io.hpp"

namespace gds {

struct PropertyReport {
  std::string name;
  bool asserted = true;  // failures of empirical properties do not fail the run
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::optional<std::size_t> failing_size;  // total point count of the smallest failure
  std::optional<Json> failing_instance;
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<PropertyReport> properties;

  bool ok() const;
  Json to_json() const;
};

/// Runs every registered property `trials` times. The outcome depends only on
/// (seed, trials).
SuiteReport verify_theorem_suite(std::uint64_t seed, std::size_t trials);

/// Names of the registered properties, in run order.
std::vector<std::string> theorem_suite_properties();

}  // namespace gds
