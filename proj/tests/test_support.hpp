#pragma once

// Shared helpers for the unit tests: rational literals, small random
// instances, and definition-level oracles that do not reuse library code
// paths.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gds/model.hpp"
#include "gds/scalar.hpp"

namespace gds::testing {

inline Rational R(long p, unsigned long q = 1) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

inline std::vector<Rational> Rs(std::initializer_list<Rational> values) { return values; }

/// Random probability vector with small denominators, all weights positive.
inline std::vector<Rational> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<long> pick(1, 4);
  std::vector<long> raw(n);
  long total = 0;
  for (auto& r : raw) total += (r = pick(rng));
  std::vector<Rational> w;
  for (long r : raw) w.push_back(R(r, static_cast<unsigned long>(total)));
  return w;
}

/// Random probability vector that may contain zeros (for Prohorov inputs).
inline std::vector<Rational> random_weights_with_zeros(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<long> pick(0, 4);
  std::vector<long> raw(n);
  long total = 0;
  for (auto& r : raw) total += (r = pick(rng));
  if (total == 0) {
    raw[0] = 1;
    total = 1;
  }
  std::vector<Rational> w;
  for (long r : raw) w.push_back(R(r, static_cast<unsigned long>(total)));
  return w;
}

inline std::vector<Rational> random_values(std::mt19937_64& rng, std::size_t n, long levels = 8) {
  std::uniform_int_distribution<long> pick(0, levels);
  std::vector<Rational> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(R(pick(rng), static_cast<unsigned long>(levels)));
  return v;
}

// ---------------------------------------------------------------------------
// Definition-level oracles.

/// mass{i : |a_i - b_i| > eps} <= eps, evaluated literally.
inline bool ky_fan_feasible(std::span<const Rational> w, std::span<const Rational> a, std::span<const Rational> b,
                            const Rational& eps) {
  Rational mass = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Rational gap = a[i] - b[i];
    if (gap < 0) gap = -gap;
    if (gap > eps) mass += w[i];
  }
  return mass <= eps;
}

/// mu(U(A; eps)) >= nu(A) - eps for every subset A, with open neighbourhoods.
inline bool prohorov_feasible(const Matrix<Rational>& d, std::span<const Rational> mu, std::span<const Rational> nu,
                              const Rational& eps) {
  const std::size_t n = mu.size();
  for (std::uint32_t A = 0; A < (1U << n); ++A) {
    Rational nu_a = 0;
    Rational mu_u = 0;
    for (std::size_t y = 0; y < n; ++y)
      if ((A >> y) & 1U) nu_a += nu[y];
    for (std::size_t x = 0; x < n; ++x) {
      bool near = false;
      for (std::size_t a = 0; a < n; ++a)
        if (((A >> a) & 1U) && d(x, a) < eps) near = true;
      if (near) mu_u += mu[x];
    }
    if (mu_u < nu_a - eps) return false;
  }
  return true;
}

/// Checks that `value` is the infimum of a monotone feasibility predicate:
/// feasible just above, infeasible just below (when value > 0).
template <class Pred>
bool is_infimum(const Rational& value, Pred&& feasible, const Rational& step = R(1, 1000)) {
  if (!feasible(value + step)) return false;
  if (value > 0 && feasible(value - step)) return false;
  return true;
}

}  // namespace gds::testing
