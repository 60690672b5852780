#pragma once

// JSON dataset documents:
//   { "points": [labels], "weights": [values], "features": { label: [values] } }
// Values are "p/q" strings, decimal strings or JSON numbers. Exact mode
// writes "p/q" strings so that parsing the output gives back the same data.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "gds/model.hpp"
#include "gds/scalar.hpp"

namespace gds {

using Json = nlohmann::ordered_json;

/// Throws SchemaError on layout or value problems, including data that
/// violates the data-set invariants.
template <Scalar T>
GeometricDataSet<T> dataset_from_json(const Json& doc);

template <Scalar T>
Json dataset_to_json(const GeometricDataSet<T>& X);

/// "-" reads standard input.
template <Scalar T>
GeometricDataSet<T> load_dataset(const std::string& path);

template <Scalar T>
GeometricDataSet<T> read_dataset(std::istream& in);

template <Scalar T>
void write_dataset(std::ostream& out, const GeometricDataSet<T>& X);

/// A scalar as a JSON value: "p/q" string for rationals, number for doubles.
template <Scalar T>
Json scalar_to_json(const T& v);

template <Scalar T>
T scalar_from_json(const Json& v);

}  // namespace gds
