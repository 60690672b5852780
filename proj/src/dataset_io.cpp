#include "gds/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <utility>
#include <vector>

#include "gds/errors.hpp"

namespace gds {

template <Scalar T>
T scalar_from_json(const Json& v) {
  T out{};
  if (v.is_string()) {
    if (!parse_scalar(v.get<std::string>(), out)) throw SchemaError("not a number: \"" + v.get<std::string>() + "\"");
    return out;
  }
  if (v.is_number_integer()) {
    // dump keeps the literal digits, so large integers stay exact
    parse_scalar(v.dump(), out);
    return out;
  }
  if (v.is_number_float()) {
    // shortest round-trip text, so 0.1 in the file means 1/10
    if (!parse_scalar(v.dump(), out)) throw SchemaError("not a finite number: " + v.dump());
    return out;
  }
  throw SchemaError("expected a number or a numeric string, got " + v.dump());
}

template <Scalar T>
Json scalar_to_json(const T& v) {
  if constexpr (scalar_traits<T>::exact) {
    return format_exact(v);
  } else {
    return v;
  }
}

template <Scalar T>
GeometricDataSet<T> dataset_from_json(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("dataset must be a JSON object");
  for (const char* key : {"points", "weights", "features"})
    if (!doc.contains(key)) throw SchemaError(std::string("missing key \"") + key + "\"");
  const Json& points = doc.at("points");
  const Json& weights = doc.at("weights");
  const Json& features = doc.at("features");
  if (!points.is_array()) throw SchemaError("\"points\" must be an array");
  if (!weights.is_array()) throw SchemaError("\"weights\" must be an array");
  if (!features.is_object()) throw SchemaError("\"features\" must be an object");
  const std::size_t n = points.size();
  if (n == 0) throw SchemaError("\"points\" is empty");
  if (weights.size() != n) throw SchemaError("\"weights\" length differs from \"points\"");
  if (features.empty()) throw SchemaError("\"features\" is empty");

  std::vector<std::string> labels;
  for (const auto& p : points) {
    if (!p.is_string()) throw SchemaError("point labels must be strings");
    labels.push_back(p.get<std::string>());
  }
  std::vector<T> w;
  for (const auto& v : weights) w.push_back(scalar_from_json<T>(v));

  Matrix<T> values(0, n);
  std::vector<std::string> names;
  for (const auto& [name, row] : features.items()) {
    if (!row.is_array() || row.size() != n) throw SchemaError("feature \"" + name + "\" must list one value per point");
    std::vector<T> r;
    if (!names.empty() && std::find(names.begin(), names.end(), name) != names.end())
      throw SchemaError("duplicate feature label \"" + name + "\"");
    for (const auto& v : row) r.push_back(scalar_from_json<T>(v));
    values.append_row(r);
    names.push_back(name);
  }
  try {
    return GeometricDataSet<T>(FeatureFamily<T>(std::move(values), std::move(names)), DiscreteMeasure<T>(std::move(w)),
                               std::move(labels));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
}

template <Scalar T>
Json dataset_to_json(const GeometricDataSet<T>& X) {
  Json doc;
  doc["points"] = X.point_labels();
  Json weights = Json::array();
  for (std::size_t x = 0; x < X.size(); ++x) weights.push_back(scalar_to_json(X.measure()[x]));
  doc["weights"] = std::move(weights);
  Json features = Json::object();
  for (std::size_t f = 0; f < X.features().size(); ++f) {
    Json row = Json::array();
    for (std::size_t x = 0; x < X.size(); ++x) row.push_back(scalar_to_json(X.features()(f, x)));
    const std::string& name = X.features().labels()[f];
    if (features.contains(name)) throw SchemaError("duplicate feature label \"" + name + "\"");
    features[name] = std::move(row);
  }
  doc["features"] = std::move(features);
  return doc;
}

template <Scalar T>
GeometricDataSet<T> read_dataset(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return dataset_from_json<T>(doc);
}

template <Scalar T>
GeometricDataSet<T> load_dataset(const std::string& path) {
  if (path == "-") return read_dataset<T>(std::cin);
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  return read_dataset<T>(in);
}

template <Scalar T>
void write_dataset(std::ostream& out, const GeometricDataSet<T>& X) {
  out << dataset_to_json(X).dump(2) << '\n';
}

#define GDS_INSTANTIATE(T)                                                  \
  template T scalar_from_json<T>(const Json&);                              \
  template Json scalar_to_json<T>(const T&);                                \
  template GeometricDataSet<T> dataset_from_json<T>(const Json&);           \
  template Json dataset_to_json<T>(const GeometricDataSet<T>&);             \
  template GeometricDataSet<T> read_dataset<T>(std::istream&);              \
  template GeometricDataSet<T> load_dataset<T>(const std::string&);         \
  template void write_dataset<T>(std::ostream&, const GeometricDataSet<T>&);

GDS_INSTANTIATE(Rational)
GDS_INSTANTIATE(double)

#undef GDS_INSTANTIATE

}  // namespace gds
