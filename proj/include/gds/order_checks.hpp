#pragma once

// Domination and isomorphism of finite geometric data sets by enumerating
// point maps in lexicographic order (point 0 most significant), plus the
// reduced partner Y' of a dominated pair.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gds/constructions.hpp"
#include "gds/errors.hpp"
#include "gds/metrics.hpp"
#include "gds/model.hpp"
#include "gds/observable_distance.hpp"
#include "gds/scalar.hpp"

namespace gds {

struct OrderVerdict {
  bool holds = false;
  std::optional<std::vector<std::size_t>> map;  // first witness X -> Y
};

inline constexpr std::uint64_t default_map_budget = std::uint64_t{1} << 20;

namespace detail {

template <Scalar T>
T sup_norm(std::span<const T> a, std::span<const T> b) {
  T worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = max_of(worst, abs_diff(a[i], b[i]));
  return worst;
}

// Rows of F_Y o phi, as functions on X.
template <Scalar T>
std::vector<std::vector<T>> pulled_back(const FeatureFamily<T>& FY, std::span<const std::size_t> phi) {
  std::vector<std::vector<T>> rows(FY.size(), std::vector<T>(phi.size()));
  for (std::size_t g = 0; g < FY.size(); ++g)
    for (std::size_t x = 0; x < phi.size(); ++x) rows[g][x] = FY(g, phi[x]);
  return rows;
}

// Distance from a function on X to the nearest row of F_X.
template <Scalar T>
T distance_to_family(std::span<const T> row, const FeatureFamily<T>& FX) {
  T best = sup_norm<T>(row, FX.row(0));
  for (std::size_t f = 1; f < FX.size(); ++f) best = min_of(best, sup_norm<T>(row, FX.row(f)));
  return best;
}

// Depth-first search over maps with the pushforward checked incrementally;
// `accept` decides the feature condition on a complete map.
template <Scalar T, class Accept>
std::optional<std::vector<std::size_t>> search_maps(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                                                    const T& tol, std::uint64_t budget, Accept&& accept) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  if (saturating_power(m, n) > budget) throw BudgetExceeded("map enumeration exceeds the budget");
  std::vector<std::size_t> phi(n, 0);
  std::vector<T> load(m, T(0));
  std::vector<T> suffix(n + 1, T(0));  // mass of points x..n-1
  for (std::size_t x = n; x-- > 0;) suffix[x] = suffix[x + 1] + mu[x];

  std::optional<std::vector<std::size_t>> found;
  auto rec = [&](auto&& self, std::size_t x) -> void {
    if (found) return;
    if (x == n) {
      for (std::size_t y = 0; y < m; ++y)
        if (abs_diff(load[y], nu[y]) > tol) return;
      if (accept(std::span<const std::size_t>(phi))) found = phi;
      return;
    }
    // the unassigned mass must still cover every deficit
    T deficit = 0;
    for (std::size_t y = 0; y < m; ++y)
      if (nu[y] > load[y]) deficit += nu[y] - load[y];
    if (deficit > suffix[x] + tol) return;
    for (std::size_t y = 0; y < m && !found; ++y) {
      if (load[y] + mu[x] > nu[y] + tol) continue;
      phi[x] = y;
      load[y] += mu[x];
      self(self, x + 1);
      load[y] -= mu[x];
    }
  };
  rec(rec, 0);
  return found;
}

}  // namespace detail

/// Does X dominate Y? A domination f: X -> Y pushes mu_X to mu_Y and every
/// row of F_Y o f lies within tol of a row of F_X.
template <Scalar T>
OrderVerdict check_domination(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y,
                              const T& tol = scalar_traits<T>::tolerance(),
                              std::uint64_t budget = default_map_budget) {
  auto found = detail::search_maps(X.measure(), Y.measure(), tol, budget, [&](std::span<const std::size_t> phi) {
    for (const auto& row : detail::pulled_back(Y.features(), phi))
      if (detail::distance_to_family<T>(row, X.features()) > tol) return false;
    return true;
  });
  return {found.has_value(), found};
}

/// Is there phi: X -> Y with phi_* mu_X = mu_Y and F_Y o phi equal to F_X as
/// sets of rows (mutual sup-norm Hausdorff distance <= tol)?
template <Scalar T>
OrderVerdict check_isomorphism(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y,
                               const T& tol = scalar_traits<T>::tolerance(),
                               std::uint64_t budget = default_map_budget) {
  auto found = detail::search_maps(X.measure(), Y.measure(), tol, budget, [&](std::span<const std::size_t> phi) {
    const auto rows = detail::pulled_back(Y.features(), phi);
    for (const auto& row : rows)
      if (detail::distance_to_family<T>(row, X.features()) > tol) return false;
    for (std::size_t f = 0; f < X.features().size(); ++f) {
      T best = detail::sup_norm<T>(X.features().row(f), rows.front());
      for (const auto& row : rows) best = min_of(best, detail::sup_norm<T>(X.features().row(f), row));
      if (best > tol) return false;
    }
    return true;
  });
  return {found.has_value(), found};
}

template <Scalar T>
struct DominatedPartner {
  Quotient<T> partner;          // Y' = Y / G with its quotient map
  std::vector<std::size_t> G;   // rows of F_Y kept, one per row of F_X'
  T dconc_reduced;              // d_conc(X', Y')
  T dconc_original;             // d_conc(X, Y)
};

/// Given a domination phi: X -> X', transfers each row of F_X' o phi to F_Y
/// along an optimal coupling of (X, Y) and quotients Y by the transferred
/// rows. Then #F_Y' <= #F_X', Y' <= Y and d_conc(X', Y') <= d_conc(X, Y).
template <Scalar T>
DominatedPartner<T> dominated_partner(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Xp,
                                      std::span<const std::size_t> phi, const GeometricDataSet<T>& Y,
                                      const DconcOptions& opt = {}) {
  if (phi.size() != X.size()) throw ShapeMismatch("dominated_partner: map must be defined on X");
  const T tol = scalar_traits<T>::tolerance();
  const auto base = dconc_exact(X, Y, opt);
  const auto u = feature_transfer(X.features(), Y.features(), base.coupling);
  std::vector<std::size_t> G;
  for (const auto& row : detail::pulled_back(Xp.features(), phi)) {
    std::size_t match = X.features().size();
    for (std::size_t f = 0; f < X.features().size() && match == X.features().size(); ++f)
      if (!(detail::sup_norm<T>(row, X.features().row(f)) > tol)) match = f;
    if (match == X.features().size()) throw InvalidInput("dominated_partner: phi is not a domination");
    G.push_back(u[match]);
  }
  std::sort(G.begin(), G.end());
  G.erase(std::unique(G.begin(), G.end()), G.end());
  Matrix<T> rows(0, Y.size());
  std::vector<std::string> labels;
  for (std::size_t g : G) {
    rows.append_row(Y.features().row(g));
    labels.push_back(Y.features().labels()[g]);
  }
  auto partner = quotient_gds(Y, FeatureFamily<T>(std::move(rows), std::move(labels)));
  const T reduced = dconc_exact(Xp, partner.space, opt).value;
  return {std::move(partner), std::move(G), reduced, base.value};
}

}  // namespace gds
