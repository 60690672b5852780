#pragma once

// Builders for named geometric data sets: singletons, products, the
// N-point discrete family, quotients by a 1-Lipschitz subfamily, Levy
// sequences, and seeded random instances.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gds/errors.hpp"
#include "gds/matrix.hpp"
#include "gds/metrics.hpp"
#include "gds/model.hpp"
#include "gds/scalar.hpp"

namespace gds {

/// One point carrying the constant features a for a in A (duplicates
/// collapsed, sorted).
template <Scalar T>
GeometricDataSet<T> singleton_gds(std::span<const T> A) {
  if (A.empty()) throw EmptyFamily("singleton_gds: the set of constants is empty");
  std::vector<T> values(A.begin(), A.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Matrix<T> features(values.size(), 1);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < values.size(); ++i) {
    features(i, 0) = values[i];
    labels.push_back("c" + std::to_string(i));
  }
  return GeometricDataSet<T>(FeatureFamily<T>(std::move(features), std::move(labels)), DiscreteMeasure<T>::dirac(),
                             {"*"});
}

template <Scalar T>
GeometricDataSet<T> singleton_gds(std::initializer_list<T> A) {
  return singleton_gds<T>(std::span<const T>(A.begin(), A.size()));
}

/// Point (x, y) has index x * |Y| + y; features are F_X o pr1 followed by
/// F_Y o pr2; the measure is the product.
template <Scalar T>
GeometricDataSet<T> product_gds(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y) {
  const std::size_t n = X.size();
  const std::size_t m = Y.size();
  Matrix<T> values(0, n * m);
  std::vector<std::string> labels;
  for (std::size_t f = 0; f < X.features().size(); ++f) {
    values.append_row(lift_first<T>(X.features().row(f), m));
    labels.push_back("X." + X.features().labels()[f]);
  }
  for (std::size_t g = 0; g < Y.features().size(); ++g) {
    values.append_row(lift_second<T>(Y.features().row(g), n));
    labels.push_back("Y." + Y.features().labels()[g]);
  }
  std::vector<T> weights;
  std::vector<std::string> points;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) {
      weights.push_back(X.measure()[x] * Y.measure()[y]);
      points.push_back(X.point_labels()[x] + "," + Y.point_labels()[y]);
    }
  return GeometricDataSet<T>(FeatureFamily<T>(std::move(values), std::move(labels)),
                             DiscreteMeasure<T>(std::move(weights)), std::move(points));
}

/// Points 1..N with the uniform measure; feature m is 0 at m and 1 elsewhere.
template <Scalar T>
GeometricDataSet<T> n_point_discrete(std::size_t N) {
  if (N == 0) throw InvalidInput("n_point_discrete: N must be at least 1");
  Matrix<T> values(N, N, T(1));
  std::vector<std::string> labels;
  std::vector<std::string> points;
  for (std::size_t i = 0; i < N; ++i) {
    values(i, i) = 0;
    labels.push_back("d" + std::to_string(i + 1));
    points.push_back(std::to_string(i + 1));
  }
  return GeometricDataSet<T>(FeatureFamily<T>(std::move(values), std::move(labels)),
                             DiscreteMeasure<T>::uniform(N), std::move(points));
}

template <Scalar T>
struct Quotient {
  GeometricDataSet<T> space;
  std::vector<std::size_t> map;  // point of X -> point of the quotient
};

/// Collapses the zero classes of the pseudometric induced by G, pushes the
/// measure forward, and descends G to the quotient (so F_Y o map = G).
template <Scalar T>
Quotient<T> quotient_gds(const GeometricDataSet<T>& X, const FeatureFamily<T>& G) {
  if (G.points() != X.size()) throw ShapeMismatch("quotient family must be defined on X");
  for (std::size_t f = 0; f < G.size(); ++f)
    if (!is_lipschitz(G.row(f), X.metric())) throw NotLipschitzFamily("quotient family row is not 1-Lipschitz");

  const Matrix<T> dG = induced_metric(G);
  const T tol = scalar_traits<T>::tolerance();
  std::vector<std::size_t> map(X.size());
  std::vector<std::size_t> representative;
  for (std::size_t x = 0; x < X.size(); ++x) {
    std::size_t cls = representative.size();
    for (std::size_t c = 0; c < representative.size(); ++c) {
      if (!(dG(x, representative[c]) > tol)) {
        if constexpr (!scalar_traits<T>::exact)
          if (dG(x, representative[c]) > 0)
            std::clog << "warning: quotient merges points at d_G = " << dG(x, representative[c])
                      << " (within tolerance)\n";
        cls = c;
        break;
      }
    }
    if (cls == representative.size()) representative.push_back(x);
    map[x] = cls;
  }
  // d_G is a pseudometric, so zero distance to a representative is transitive:
  // the classes above are exactly its zero classes.

  const std::size_t k = representative.size();
  Matrix<T> values(G.size(), k);
  for (std::size_t f = 0; f < G.size(); ++f)
    for (std::size_t c = 0; c < k; ++c) values(f, c) = G(f, representative[c]);
  auto image = pushforward(X.measure(), map, k);
  std::vector<std::string> points;
  for (std::size_t c = 0; c < k; ++c) points.push_back("[" + X.point_labels()[representative[c]] + "]");
  return {GeometricDataSet<T>(FeatureFamily<T>(std::move(values), G.labels()), image.support, std::move(points)),
          std::move(map)};
}

enum class LevyKind { n_point_discrete, product_power };

/// N = 1..n_max: X_N for the discrete kind, base^N for product powers.
template <Scalar T>
std::vector<GeometricDataSet<T>> levy_sequence(LevyKind kind, std::size_t n_max,
                                               const GeometricDataSet<T>* base = nullptr) {
  std::vector<GeometricDataSet<T>> out;
  if (kind == LevyKind::n_point_discrete) {
    for (std::size_t N = 1; N <= n_max; ++N) out.push_back(n_point_discrete<T>(N));
    return out;
  }
  if (base == nullptr) throw InvalidInput("levy_sequence: product powers need a base data set");
  for (std::size_t N = 1; N <= n_max; ++N) out.push_back(N == 1 ? *base : product_gds(out.back(), *base));
  return out;
}

/// Observable diameter of each member (rows) at each kappa (columns).
template <Scalar T>
Matrix<T> levy_table(const std::vector<GeometricDataSet<T>>& sequence, std::span<const T> kappas) {
  Matrix<T> table(sequence.size(), kappas.size());
  for (std::size_t i = 0; i < sequence.size(); ++i)
    for (std::size_t j = 0; j < kappas.size(); ++j) table(i, j) = observable_diameter(sequence[i], kappas[j]);
  return table;
}

/// Seeded instance with feature values on the grid scale * {0, 1/8, ..., 1}
/// (finer when needed to separate n points) and positive integer weights
/// normalized to 1. Draws again until the induced metric separates points.
template <Scalar T>
GeometricDataSet<T> random_gds(std::size_t n, std::size_t k, std::uint64_t seed, const T& scale = T(1)) {
  if (n == 0 || k == 0) throw InvalidInput("random_gds: n and k must be positive");
  std::mt19937_64 rng(seed);
  const std::int64_t levels = std::max<std::int64_t>(8, static_cast<std::int64_t>(2 * n));
  std::uniform_int_distribution<std::int64_t> level(0, levels);
  std::uniform_int_distribution<std::int64_t> raw_weight(1, 4);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Matrix<T> values(k, n);
    for (std::size_t f = 0; f < k; ++f)
      for (std::size_t x = 0; x < n; ++x) values(f, x) = T(from_ratio<T>(level(rng), levels) * scale);
    std::vector<std::int64_t> raw(n);
    std::int64_t total = 0;
    for (auto& r : raw) total += (r = raw_weight(rng));
    std::vector<T> weights;
    for (auto r : raw) weights.push_back(from_ratio<T>(r, total));
    if constexpr (!scalar_traits<T>::exact) {
      // absorb rounding so the total is 1 within tolerance
      T sum = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) sum += weights[i];
      weights.back() = T(1) - sum;
    }
    FeatureFamily<T> F(std::move(values));
    const Matrix<T> d = induced_metric(F);
    bool separated = true;
    for (std::size_t x = 0; x < n && separated; ++x)
      for (std::size_t y = x + 1; y < n; ++y)
        if (!(d(x, y) > scalar_traits<T>::tolerance())) separated = false;
    if (separated) return GeometricDataSet<T>(std::move(F), DiscreteMeasure<T>(std::move(weights)));
  }
  throw InvalidInput("random_gds: could not draw a separating family");
}

}  // namespace gds
