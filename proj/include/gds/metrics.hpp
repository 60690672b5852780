#pragma once

// Scalar metrics between measures and functions on finite spaces: Ky Fan,
// Prohorov (two independent routes), the sup pseudometric over a cell set,
// Hausdorff distance between finite families, partial and observable
// diameter.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "gds/cells.hpp"
#include "gds/errors.hpp"
#include "gds/matrix.hpp"
#include "gds/max_flow.hpp"
#include "gds/model.hpp"
#include "gds/scalar.hpp"

namespace gds {

/// min eps >= 0 with mass{i : |a_i - b_i| > eps} <= eps.
///
/// The exceed mass is a right-continuous step function of eps, constant on
/// [v_j, v_{j+1}) between consecutive distinct gaps, so the minimum is
/// attained at max(v_j, tail(v_j)) for some breakpoint v_j (v_0 = 0).
/// Zero-weight indices are allowed and ignored.
template <Scalar T>
T ky_fan(std::span<const T> weights, std::span<const T> a, std::span<const T> b) {
  if (a.size() != weights.size() || b.size() != weights.size())
    throw ShapeMismatch("ky_fan: value vectors must match the measure");
  std::vector<std::pair<T, T>> gaps;  // (|a - b|, weight)
  gaps.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0) gaps.emplace_back(abs_diff(a[i], b[i]), weights[i]);
  }
  std::sort(gaps.begin(), gaps.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

  // Walk breakpoints from the largest gap down, accumulating the exceed mass.
  T tail = 0;
  T best = -1;
  std::size_t i = gaps.size();
  while (i > 0) {
    const T level = gaps[i - 1].first;
    // tail currently = mass strictly above `level`
    const T candidate = max_of(level, tail);
    if (best < 0 || candidate < best) best = candidate;
    while (i > 0 && gaps[i - 1].first == level) {
      tail += gaps[i - 1].second;
      --i;
    }
  }
  // Breakpoint 0 when no gap is exactly 0: everything exceeds it.
  if (gaps.empty() || gaps.front().first > 0) {
    if (best < 0 || tail < best) best = tail;
  }
  return best;
}

template <Scalar T>
T ky_fan(const DiscreteMeasure<T>& measure, std::span<const T> a, std::span<const T> b) {
  return ky_fan<T>(measure.weights(), a, b);
}

/// Ky Fan distance under a coupling between f o pr1 and g o pr2.
template <Scalar T>
T ky_fan_coupling(const Coupling<T>& pi, std::span<const T> f, std::span<const T> g) {
  if (f.size() != pi.rows() || g.size() != pi.cols()) throw ShapeMismatch("ky_fan_coupling: feature shapes");
  std::vector<T> weights;
  std::vector<T> a;
  std::vector<T> b;
  for (std::size_t x = 0; x < pi.rows(); ++x) {
    for (std::size_t y = 0; y < pi.cols(); ++y) {
      weights.push_back(pi(x, y));
      a.push_back(f[x]);
      b.push_back(g[y]);
    }
  }
  return ky_fan<T>(weights, a, b);
}

/// max over cells of S of |u - v|; 0 for the empty set.
template <Scalar T>
T sup_pseudometric(const CellSet& S, std::span<const T> u, std::span<const T> v) {
  T best = 0;
  for (std::size_t c : S.cells()) best = max_of(best, abs_diff(u[c], v[c]));
  return best;
}

/// Hausdorff distance between two finite families under a pair distance
/// `dist(i, j)` (i indexes A, j indexes B).
template <class Dist>
auto hausdorff(std::size_t a_count, std::size_t b_count, Dist&& dist) -> decltype(dist(std::size_t{}, std::size_t{})) {
  using T = decltype(dist(std::size_t{}, std::size_t{}));
  if (a_count == 0 || b_count == 0) throw EmptyFamily("hausdorff: families must be non-empty");
  Matrix<T> d(a_count, b_count);
  for (std::size_t i = 0; i < a_count; ++i)
    for (std::size_t j = 0; j < b_count; ++j) d(i, j) = dist(i, j);
  T worst = 0;
  for (std::size_t i = 0; i < a_count; ++i) {
    T nearest = d(i, 0);
    for (std::size_t j = 1; j < b_count; ++j) nearest = min_of(nearest, d(i, j));
    worst = max_of(worst, nearest);
  }
  for (std::size_t j = 0; j < b_count; ++j) {
    T nearest = d(0, j);
    for (std::size_t i = 1; i < a_count; ++i) nearest = min_of(nearest, d(i, j));
    worst = max_of(worst, nearest);
  }
  return worst;
}

/// Hausdorff distance between families of items under an item pseudometric.
template <class Item, class Dist>
auto hausdorff(const std::vector<Item>& A, const std::vector<Item>& B, Dist&& dist) {
  return hausdorff(A.size(), B.size(), [&](std::size_t i, std::size_t j) { return dist(A[i], B[j]); });
}

// ---------------------------------------------------------------------------
// Prohorov distance on a finite metric space.

enum class ProhorovMethod { automatic, brute_force, max_flow };

namespace detail {

template <Scalar T>
void check_prohorov_inputs(const Matrix<T>& d, std::span<const T> mu, std::span<const T> nu) {
  if (d.rows() != d.cols() || d.rows() != mu.size() || d.rows() != nu.size())
    throw ShapeMismatch("prohorov: measures must live on the given metric");
  for (const T& w : mu)
    if (w < 0) throw InvalidInput("prohorov: negative weight");
  for (const T& w : nu)
    if (w < 0) throw InvalidInput("prohorov: negative weight");
}

/// Distinct distance values in increasing order, starting at 0.
template <Scalar T>
std::vector<T> distance_levels(const Matrix<T>& d) {
  std::vector<T> levels{T(0)};
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) levels.push_back(d(i, j));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

// max over A of nu(A) - mu({x : d(x, A) <= r}) by subset enumeration.
template <Scalar T>
T worst_deficit_brute(const Matrix<T>& d, std::span<const T> mu, std::span<const T> nu, const T& r) {
  const std::size_t n = mu.size();
  std::vector<std::uint32_t> ball(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t x = 0; x < n; ++x)
      if (d(x, a) <= r) ball[a] |= std::uint32_t{1} << x;

  const std::uint32_t subsets = std::uint32_t{1} << n;
  std::vector<T> mu_mass(subsets, T(0));
  for (std::uint32_t s = 1; s < subsets; ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    mu_mass[s] = mu_mass[s & (s - 1)] + mu[low];
  }
  T worst = 0;
  std::vector<T> nu_mass(subsets, T(0));
  std::vector<std::uint32_t> hood(subsets, 0);
  for (std::uint32_t s = 1; s < subsets; ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    nu_mass[s] = nu_mass[s & (s - 1)] + nu[low];
    hood[s] = hood[s & (s - 1)] | ball[low];
    T deficit = nu_mass[s] - mu_mass[hood[s]];
    if (deficit > worst) worst = deficit;
  }
  return worst;
}

// Same quantity through the Strassen max-flow reduction: the maximum mass of
// nu that can be routed to mu along pairs at distance <= r equals
// total(nu) - max_A(nu(A) - mu(N_r(A))).
template <Scalar T>
T worst_deficit_flow(const Matrix<T>& d, std::span<const T> mu, std::span<const T> nu, const T& r) {
  const std::size_t n = mu.size();
  const std::size_t source = 2 * n;
  const std::size_t sink = 2 * n + 1;
  MaxFlow<T> flow(2 * n + 2);
  T total_nu = 0;
  for (const T& w : nu) total_nu += w;
  const T unbounded = total_nu + T(1);
  for (std::size_t y = 0; y < n; ++y) {
    if (nu[y] > 0) flow.add_edge(source, y, nu[y]);
    for (std::size_t x = 0; x < n; ++x)
      if (d(x, y) <= r) flow.add_edge(y, n + x, unbounded);
  }
  for (std::size_t x = 0; x < n; ++x)
    if (mu[x] > 0) flow.add_edge(n + x, sink, mu[x]);
  return total_nu - flow.run(source, sink);
}

}  // namespace detail

/// Exhaustive route: for every distance level r, scans all 2^n subsets A.
template <Scalar T>
T prohorov_brute_force(const Matrix<T>& d, std::span<const T> mu, std::span<const T> nu) {
  detail::check_prohorov_inputs(d, mu, nu);
  if (mu.size() > 20) throw SizeLimit("prohorov brute force supports at most 20 points");
  T best = 1;
  for (const T& r : detail::distance_levels(d)) {
    // On (r, r_next] the open eps-neighbourhood of A is the closed r-ball.
    const T candidate = max_of(r, detail::worst_deficit_brute(d, mu, nu, r));
    if (candidate < best) best = candidate;
  }
  return best;
}

/// Max-flow route, bisected over the distance levels: the deficit is
/// non-increasing in the level, so the optimum sits where it drops below the
/// level itself.
template <Scalar T>
T prohorov_max_flow(const Matrix<T>& d, std::span<const T> mu, std::span<const T> nu) {
  detail::check_prohorov_inputs(d, mu, nu);
  const std::vector<T> levels = detail::distance_levels(d);
  // first index with deficit <= level
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  T deficit_hi = detail::worst_deficit_flow(d, mu, nu, levels[hi]);
  if (!(deficit_hi <= levels[hi])) {
    // only possible when the last level is below the leftover deficit
    return min_of(T(1), max_of(levels[hi], deficit_hi));
  }
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (detail::worst_deficit_flow(d, mu, nu, levels[mid]) <= levels[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  T best = levels[lo];
  if (lo > 0) best = min_of(best, detail::worst_deficit_flow(d, mu, nu, levels[lo - 1]));
  return min_of(best, T(1));
}

template <Scalar T>
T prohorov(const Matrix<T>& d, std::span<const T> mu, std::span<const T> nu,
           ProhorovMethod method = ProhorovMethod::automatic) {
  if (method == ProhorovMethod::brute_force || (method == ProhorovMethod::automatic && mu.size() <= 12))
    return prohorov_brute_force(d, mu, nu);
  return prohorov_max_flow(d, mu, nu);
}

/// Prohorov distance between two measures on the real line supported on the
/// listed atoms (values may repeat across the two lists).
template <Scalar T>
T prohorov_on_line(std::span<const T> values_mu, std::span<const T> weights_mu, std::span<const T> values_nu,
                   std::span<const T> weights_nu, ProhorovMethod method = ProhorovMethod::automatic) {
  std::vector<T> points(values_mu.begin(), values_mu.end());
  points.insert(points.end(), values_nu.begin(), values_nu.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto index_of = [&](const T& v) {
    return static_cast<std::size_t>(std::lower_bound(points.begin(), points.end(), v) - points.begin());
  };
  std::vector<T> mu(points.size(), T(0));
  std::vector<T> nu(points.size(), T(0));
  for (std::size_t i = 0; i < values_mu.size(); ++i) mu[index_of(values_mu[i])] += weights_mu[i];
  for (std::size_t i = 0; i < values_nu.size(); ++i) nu[index_of(values_nu[i])] += weights_nu[i];
  Matrix<T> d(points.size(), points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) d(i, j) = abs_diff(points[i], points[j]);
  return prohorov<T>(d, mu, nu, method);
}

// ---------------------------------------------------------------------------
// Partial and observable diameter.

/// Least (max - min) over contiguous windows of the sorted atoms carrying
/// mass >= alpha. 0 when alpha <= 0 or a single atom suffices.
template <Scalar T>
T partial_diameter(std::span<const T> values, std::span<const T> weights, const T& alpha) {
  if (values.size() != weights.size()) throw ShapeMismatch("partial_diameter: values and weights differ in size");
  if (alpha < 0 || alpha > T(1) + scalar_traits<T>::tolerance())
    throw InvalidInput("partial_diameter: alpha must lie in [0, 1]");
  if (!(alpha > 0)) return T(0);

  std::vector<std::pair<T, T>> atoms;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (weights[i] > 0) atoms.emplace_back(values[i], weights[i]);
  std::sort(atoms.begin(), atoms.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<std::pair<T, T>> merged;
  for (const auto& atom : atoms) {
    if (!merged.empty() && merged.back().first == atom.first) {
      merged.back().second += atom.second;
    } else {
      merged.push_back(atom);
    }
  }

  const T needed = alpha - scalar_traits<T>::tolerance();
  T best = -1;
  T mass = 0;
  std::size_t right = 0;
  for (std::size_t left = 0; left < merged.size(); ++left) {
    while (right < merged.size() && mass < needed) mass += merged[right++].second;
    if (mass < needed) break;
    const T width = merged[right - 1].first - merged[left].first;
    if (best < 0 || width < best) best = width;
    mass -= merged[left].second;
  }
  if (best < 0) {
    // alpha exceeds the available mass (float rounding); the whole support is
    // the only candidate.
    return merged.empty() ? T(0) : T(merged.back().first - merged.front().first);
  }
  return best;
}

template <Scalar T>
T partial_diameter(std::span<const T> values, const DiscreteMeasure<T>& measure, const T& alpha) {
  return partial_diameter<T>(values, measure.weights(), alpha);
}

/// max over features f of the (1 - kappa)-partial diameter of f_* mu.
/// kappa is accepted on the closed interval [0, 1].
template <Scalar T>
T observable_diameter(const GeometricDataSet<T>& X, const T& kappa) {
  if (kappa < 0 || kappa > 1) throw InvalidInput("observable_diameter: kappa must lie in [0, 1]");
  const T alpha = T(1) - kappa;
  T best = 0;
  for (std::size_t f = 0; f < X.features().size(); ++f)
    best = max_of(best, partial_diameter<T>(X.features().row(f), X.measure(), alpha));
  return best;
}

/// The kappa values in [0, 1] at which the observable diameter can jump:
/// 1 - (mass of a contiguous window of atoms) for some feature.
template <Scalar T>
std::vector<T> observable_diameter_breakpoints(const GeometricDataSet<T>& X) {
  std::vector<T> out{T(0), T(1)};
  for (std::size_t f = 0; f < X.features().size(); ++f) {
    auto row = X.features().row(f);
    std::vector<std::size_t> order(row.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    // windows over distinct values
    std::vector<T> masses;
    std::vector<T> levels;
    for (std::size_t i : order) {
      if (!levels.empty() && levels.back() == row[i]) {
        masses.back() += X.measure()[i];
      } else {
        levels.push_back(row[i]);
        masses.push_back(X.measure()[i]);
      }
    }
    for (std::size_t l = 0; l < masses.size(); ++l) {
      T m = 0;
      for (std::size_t r = l; r < masses.size(); ++r) {
        m += masses[r];
        T kappa = T(1) - m;
        if (kappa < 0) kappa = 0;
        out.push_back(kappa);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace gds
