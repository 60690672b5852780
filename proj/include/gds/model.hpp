#pragma once

// Finite geometric data sets and mm-spaces.
//
// Points are indexed 0..n-1 and every structure is dense. A geometric data
// set carries a finite feature family; finite families are already closed
// under pointwise convergence, so no closure is ever taken.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gds/errors.hpp"
#include "gds/matrix.hpp"
#include "gds/scalar.hpp"

namespace gds {

/// Probability weights with full support.
template <Scalar T>
class DiscreteMeasure {
 public:
  struct Normalized;

  DiscreteMeasure() = default;

  /// Rejects zero or negative weights and totals other than 1.
  explicit DiscreteMeasure(std::vector<T> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InvalidInput("measure has no points");
    for (const T& w : weights_) {
      if (!(w > 0)) throw InvalidInput("measure weights must be strictly positive (full support)");
    }
    check_total(weights_);
  }

  /// Drops zero-weight points instead of rejecting them; `kept` maps new
  /// indices to the original ones.
  static Normalized normalize_support(std::span<const T> weights);

  static DiscreteMeasure uniform(std::size_t n) {
    std::vector<T> w(n, from_ratio<T>(1, static_cast<std::int64_t>(n)));
    if constexpr (!scalar_traits<T>::exact) {
      // keep the float total at exactly representable 1 where possible
      T sum = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) sum += w[i];
      if (n > 0) w.back() = T(1) - sum;
    }
    return DiscreteMeasure(std::move(w));
  }

  static DiscreteMeasure dirac() { return DiscreteMeasure(std::vector<T>{T(1)}); }

  std::size_t size() const { return weights_.size(); }
  const T& operator[](std::size_t i) const { return weights_[i]; }
  std::span<const T> weights() const { return weights_; }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

  static void check_total(std::span<const T> weights) {
    T total = 0;
    for (const T& w : weights) total += w;
    if (abs_diff(total, T(1)) > scalar_traits<T>::mass_tolerance())
      throw InvalidInput("measure weights must sum to 1");
  }

 private:
  std::vector<T> weights_;
};

template <Scalar T>
struct DiscreteMeasure<T>::Normalized {
  DiscreteMeasure<T> measure;
  std::vector<std::size_t> kept;
};

template <Scalar T>
typename DiscreteMeasure<T>::Normalized DiscreteMeasure<T>::normalize_support(std::span<const T> weights) {
  Normalized out;
  std::vector<T> kept_weights;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0) throw InvalidInput("negative weight");
    if (weights[i] > 0) {
      kept_weights.push_back(weights[i]);
      out.kept.push_back(i);
    }
  }
  out.measure = DiscreteMeasure<T>(std::move(kept_weights));
  return out;
}

/// k features (rows) evaluated on n points (columns). Duplicate rows are
/// allowed.
template <Scalar T>
class FeatureFamily {
 public:
  FeatureFamily() = default;

  FeatureFamily(Matrix<T> values, std::vector<std::string> labels = {})
      : values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.rows() == 0) throw InvalidInput("feature family must contain at least one feature");
    if (labels_.empty()) {
      for (std::size_t i = 0; i < values_.rows(); ++i) labels_.push_back("f" + std::to_string(i));
    }
    if (labels_.size() != values_.rows()) throw InvalidInput("feature label count does not match rows");
  }

  static FeatureFamily from_rows(const std::vector<std::vector<T>>& rows, std::vector<std::string> labels = {}) {
    return FeatureFamily(Matrix<T>::from_rows(rows), std::move(labels));
  }

  std::size_t size() const { return values_.rows(); }
  std::size_t points() const { return values_.cols(); }
  std::span<const T> row(std::size_t f) const { return values_.row(f); }
  const T& operator()(std::size_t f, std::size_t x) const { return values_(f, x); }
  const Matrix<T>& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const FeatureFamily&, const FeatureFamily&) = default;

 private:
  Matrix<T> values_;
  std::vector<std::string> labels_;
};

/// d_F(x, y) = max over features of |f(x) - f(y)|.
template <Scalar T>
Matrix<T> induced_metric(const FeatureFamily<T>& features) {
  const std::size_t n = features.points();
  Matrix<T> d(n, n);
  for (std::size_t f = 0; f < features.size(); ++f) {
    auto row = features.row(f);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        T gap = abs_diff(row[x], row[y]);
        if (d(x, y) < gap) {
          d(x, y) = gap;
          d(y, x) = gap;
        }
      }
    }
  }
  return d;
}

inline std::vector<std::string> default_point_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

template <Scalar T>
void require_separated(const Matrix<T>& d) {
  for (std::size_t x = 0; x < d.rows(); ++x)
    for (std::size_t y = x + 1; y < d.cols(); ++y)
      if (!(d(x, y) > scalar_traits<T>::tolerance()))
        throw SeparationFailure("points " + std::to_string(x) + " and " + std::to_string(y) +
                                " are not separated by the feature family");
}

template <Scalar T>
class GeometricDataSet {
 public:
  GeometricDataSet() = default;

  GeometricDataSet(FeatureFamily<T> features, DiscreteMeasure<T> measure, std::vector<std::string> point_labels = {})
      : features_(std::move(features)), measure_(std::move(measure)), point_labels_(std::move(point_labels)) {
    if (features_.points() != measure_.size())
      throw ShapeMismatch("feature columns do not match measure size");
    if (point_labels_.empty()) point_labels_ = default_point_labels(size());
    if (point_labels_.size() != size()) throw ShapeMismatch("point label count does not match measure size");
    metric_ = induced_metric(features_);
    require_separated(metric_);
  }

  std::size_t size() const { return measure_.size(); }
  const FeatureFamily<T>& features() const { return features_; }
  const DiscreteMeasure<T>& measure() const { return measure_; }
  const Matrix<T>& metric() const { return metric_; }
  const std::vector<std::string>& point_labels() const { return point_labels_; }

  friend bool operator==(const GeometricDataSet& a, const GeometricDataSet& b) {
    return a.features_ == b.features_ && a.measure_ == b.measure_ && a.point_labels_ == b.point_labels_;
  }

 private:
  FeatureFamily<T> features_;
  DiscreteMeasure<T> measure_;
  std::vector<std::string> point_labels_;
  Matrix<T> metric_;
};

template <Scalar T>
class MmSpace {
 public:
  MmSpace() = default;

  MmSpace(Matrix<T> dist, DiscreteMeasure<T> measure) : dist_(std::move(dist)), measure_(std::move(measure)) {
    const std::size_t n = measure_.size();
    if (dist_.rows() != n || dist_.cols() != n) throw ShapeMismatch("distance matrix does not match measure size");
    const T tol = scalar_traits<T>::tolerance();
    for (std::size_t x = 0; x < n; ++x) {
      if (dist_(x, x) != 0) throw InvalidInput("distance matrix must have a zero diagonal");
      for (std::size_t y = 0; y < n; ++y) {
        if (abs_diff(dist_(x, y), dist_(y, x)) > tol) throw InvalidInput("distance matrix must be symmetric");
        if (x != y && !(dist_(x, y) > 0)) throw InvalidInput("distinct points must have positive distance");
        for (std::size_t z = 0; z < n; ++z)
          if (dist_(x, z) > dist_(x, y) + dist_(y, z) + tol)
            throw InvalidInput("distance matrix violates the triangle inequality");
      }
    }
  }

  std::size_t size() const { return measure_.size(); }
  const Matrix<T>& dist() const { return dist_; }
  const DiscreteMeasure<T>& measure() const { return measure_; }

 private:
  Matrix<T> dist_;
  DiscreteMeasure<T> measure_;
};

template <Scalar T>
MmSpace<T> gds_to_mm(const GeometricDataSet<T>& X) {
  require_separated(X.metric());
  return MmSpace<T>(X.metric(), X.measure());
}

/// The distance functions d(x, .) for every x; they induce the metric exactly.
template <Scalar T>
FeatureFamily<T> mm_lip1_generators(const MmSpace<T>& M) {
  std::vector<std::string> labels;
  for (std::size_t x = 0; x < M.size(); ++x) labels.push_back("d(" + std::to_string(x) + ",.)");
  return FeatureFamily<T>(M.dist(), std::move(labels));
}

/// Generators followed by `count` random 1-Lipschitz functions of the form
/// z -> min over anchors a of (v_a + d(a, z)).
template <Scalar T>
FeatureFamily<T> sample_lip1(const MmSpace<T>& M, std::size_t count, std::uint64_t seed) {
  const std::size_t n = M.size();
  Matrix<T> values = M.dist();
  std::vector<std::string> labels = mm_lip1_generators(M).labels();

  T diameter = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) diameter = max_of(diameter, M.dist()(x, y));
  if (diameter == 0) diameter = T(1);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> anchor_count(1, n);
  std::uniform_int_distribution<std::size_t> anchor_point(0, n - 1);
  std::uniform_int_distribution<int> level(0, 16);
  std::vector<T> row(n);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t anchors = anchor_count(rng);
    std::vector<std::pair<std::size_t, T>> chosen;
    for (std::size_t a = 0; a < anchors; ++a)
      chosen.emplace_back(anchor_point(rng), T(from_ratio<T>(level(rng), 16) * diameter));
    for (std::size_t z = 0; z < n; ++z) {
      T best = chosen.front().second + M.dist()(chosen.front().first, z);
      for (const auto& [a, v] : chosen) best = min_of(best, T(v + M.dist()(a, z)));
      row[z] = best;
    }
    values.append_row(row);
    labels.push_back("lip" + std::to_string(s));
  }
  return FeatureFamily<T>(std::move(values), std::move(labels));
}

template <Scalar T>
struct Pushforward {
  std::vector<T> weights;                  // indexed by target point, zeros kept
  DiscreteMeasure<T> support;              // zero-weight targets dropped
  std::vector<std::size_t> support_index;  // support position -> target point
};

/// Image measure of `weights` under the total assignment `map` into
/// {0..target_size-1}.
template <Scalar T>
Pushforward<T> pushforward(std::span<const T> weights, std::span<const std::size_t> map, std::size_t target_size) {
  if (map.size() != weights.size()) throw ShapeMismatch("assignment must be total on the domain");
  Pushforward<T> out;
  out.weights.assign(target_size, T(0));
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] >= target_size) throw ShapeMismatch("assignment target out of range");
    out.weights[map[i]] += weights[i];
  }
  auto normalized = DiscreteMeasure<T>::normalize_support(out.weights);
  out.support = std::move(normalized.measure);
  out.support_index = std::move(normalized.kept);
  return out;
}

template <Scalar T>
Pushforward<T> pushforward(const DiscreteMeasure<T>& measure, std::span<const std::size_t> map,
                           std::size_t target_size) {
  return pushforward<T>(measure.weights(), map, target_size);
}

/// Values of a feature on the grid X x Y (index x * m + y) lifted through the
/// first projection.
template <Scalar T>
std::vector<T> lift_first(std::span<const T> f, std::size_t m) {
  std::vector<T> out;
  out.reserve(f.size() * m);
  for (const T& v : f)
    for (std::size_t y = 0; y < m; ++y) out.push_back(v);
  return out;
}

template <Scalar T>
std::vector<T> lift_second(std::span<const T> g, std::size_t n) {
  std::vector<T> out;
  out.reserve(g.size() * n);
  for (std::size_t x = 0; x < n; ++x) out.insert(out.end(), g.begin(), g.end());
  return out;
}

template <Scalar T>
bool is_lipschitz(std::span<const T> f, const Matrix<T>& d) {
  for (std::size_t x = 0; x < f.size(); ++x)
    for (std::size_t y = x + 1; y < f.size(); ++y)
      if (!approx_le(abs_diff(f[x], f[y]), d(x, y))) return false;
  return true;
}

}  // namespace gds
