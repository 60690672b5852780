#pragma once

// Box distance between geometric data sets and between finite mm-spaces.
//
// For a fixed cell set S the Hausdorff term 2 H_S(F_X o pr1, F_Y o pr2) does
// not depend on the coupling, so
//   Box(X, Y) = min over S of max(1 - max_pi pi(S), 2 H_S),
// and the inner maximum is a max-flow. The exact routes enumerate cell sets;
// both terms are monotone in S, so only sets that cannot be enlarged at
// equal cost are evaluated.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "gds/cells.hpp"
#include "gds/coupling.hpp"
#include "gds/errors.hpp"
#include "gds/matrix.hpp"
#include "gds/metrics.hpp"
#include "gds/model.hpp"
#include "gds/observable_distance.hpp"
#include "gds/scalar.hpp"

namespace gds {

/// max over cell pairs in S of |dX(x1, x2) - dY(y1, y2)|; 0 when |S| <= 1.
template <Scalar T>
T distortion(const CellSet& S, const Matrix<T>& dX, const Matrix<T>& dY) {
  if (dX.rows() != S.rows() || dY.rows() != S.cols()) throw ShapeMismatch("distortion: cell set shape");
  const std::size_t m = S.cols();
  const auto cells = S.cells();
  T worst = 0;
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b)
      worst = max_of(worst, abs_diff(dX(cells[a] / m, cells[b] / m), dY(cells[a] % m, cells[b] % m)));
  return worst;
}

/// Hausdorff distance between F_X o pr1 and F_Y o pr2 under the sup
/// pseudometric over S (0 for empty S).
template <Scalar T>
T box_hausdorff(const CellSet& S, const FeatureFamily<T>& FX, const FeatureFamily<T>& FY) {
  if (FX.points() != S.rows() || FY.points() != S.cols()) throw ShapeMismatch("box_hausdorff: cell set shape");
  const std::size_t m = S.cols();
  const auto cells = S.cells();
  return hausdorff(FX.size(), FY.size(), [&](std::size_t f, std::size_t g) {
    T worst = 0;
    for (std::size_t c : cells) worst = max_of(worst, abs_diff(FX(f, c / m), FY(g, c % m)));
    return worst;
  });
}

/// max(1 - pi(S), 2 H_S(F_X o pr1, F_Y o pr2)).
template <Scalar T>
T box_objective(const Coupling<T>& pi, const CellSet& S, const FeatureFamily<T>& FX, const FeatureFamily<T>& FY) {
  if (pi.rows() != S.rows() || pi.cols() != S.cols()) throw ShapeMismatch("box_objective: cell set shape");
  return max_of(T(T(1) - pi.mass_on(S)), T(2 * box_hausdorff(S, FX, FY)));
}

/// The function g(y) = dis S / 2 + min over (x, z) in S of (f(x) + dY(z, y)).
/// It is 1-Lipschitz on Y and within dis S / 2 of f on S.
template <Scalar T>
std::vector<T> lip1_witness(const CellSet& S, std::span<const T> f, const Matrix<T>& dX, const Matrix<T>& dY) {
  if (S.empty()) throw EmptyCellSet("lip1_witness: the cell set is empty");
  if (f.size() != dX.rows() || S.rows() != dX.rows() || S.cols() != dY.rows())
    throw ShapeMismatch("lip1_witness: shapes differ");
  if (!is_lipschitz(f, dX)) throw WitnessNotLipschitz("lip1_witness: f is not 1-Lipschitz on X");
  const std::size_t m = S.cols();
  const T half = distortion(S, dX, dY) / 2;
  const auto cells = S.cells();
  std::vector<T> g(m);
  for (std::size_t y = 0; y < m; ++y) {
    T best = f[cells.front() / m] + dY(cells.front() % m, y);
    for (std::size_t c : cells) best = min_of(best, T(f[c / m] + dY(c % m, y)));
    g[y] = half + best;
  }
  return g;
}

template <Scalar T>
struct CellSetValue {
  T value;
  CellSet cells;
};

namespace detail {

inline constexpr std::size_t max_enumerated_cells = 20;

// Costs of all cell sets as ranks into a sorted value list.
template <Scalar T>
struct CostTable {
  std::vector<T> values;            // sorted, values[0] == 0
  std::vector<std::uint16_t> cost;  // indexed by cell-set bits
};

template <Scalar T>
std::uint16_t rank_of(const std::vector<T>& values, const T& v) {
  return static_cast<std::uint16_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin());
}

template <Scalar T>
void finish_values(std::vector<T>& values) {
  values.push_back(T(0));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() >= 65536) throw SizeLimit("too many distinct values for the cell-set scan");
}

inline void check_enumeration_size(std::size_t cells, std::size_t limit) {
  if (cells > limit || cells > max_enumerated_cells)
    throw SizeLimit("cell-set enumeration exceeds the cell budget");
}

/// 2 H_S for every S.
template <Scalar T>
CostTable<T> box_cost_table(const FeatureFamily<T>& FX, const FeatureFamily<T>& FY) {
  const std::size_t n = FX.points();
  const std::size_t m = FY.points();
  const std::size_t N = n * m;
  const std::size_t kx = FX.size();
  const std::size_t ky = FY.size();
  const std::size_t P = kx * ky;
  CostTable<T> table;
  for (std::size_t f = 0; f < kx; ++f)
    for (std::size_t g = 0; g < ky; ++g)
      for (std::size_t c = 0; c < N; ++c) table.values.push_back(abs_diff(FX(f, c / m), FY(g, c % m)));
  finish_values(table.values);

  std::vector<std::uint16_t> pair_rank(P * N);
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t c = 0; c < N; ++c)
      pair_rank[p * N + c] = rank_of(table.values, abs_diff(FX(p / ky, c / m), FY(p % ky, c % m)));

  const std::size_t subsets = std::size_t{1} << N;
  std::vector<std::uint16_t> sup(subsets * P, 0);  // per pair, max rank over S
  table.cost.assign(subsets, 0);
  for (std::size_t s = 1; s < subsets; ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    const std::size_t prev = s & (s - 1);
    for (std::size_t p = 0; p < P; ++p)
      sup[s * P + p] = std::max(sup[prev * P + p], pair_rank[p * N + low]);
    std::uint16_t h = 0;
    for (std::size_t f = 0; f < kx; ++f) {
      std::uint16_t best = sup[s * P + f * ky];
      for (std::size_t g = 1; g < ky; ++g) best = std::min(best, sup[s * P + f * ky + g]);
      h = std::max(h, best);
    }
    for (std::size_t g = 0; g < ky; ++g) {
      std::uint16_t best = sup[s * P + g];
      for (std::size_t f = 1; f < kx; ++f) best = std::min(best, sup[s * P + f * ky + g]);
      h = std::max(h, best);
    }
    table.cost[s] = h;
  }
  for (T& v : table.values) v *= 2;
  return table;
}

/// dis S for every S.
template <Scalar T>
CostTable<T> distortion_cost_table(const Matrix<T>& dX, const Matrix<T>& dY) {
  const std::size_t n = dX.rows();
  const std::size_t m = dY.rows();
  const std::size_t N = n * m;
  CostTable<T> table;
  auto pair_dis = [&](std::size_t a, std::size_t b) { return abs_diff(dX(a / m, b / m), dY(a % m, b % m)); };
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b) table.values.push_back(pair_dis(a, b));
  finish_values(table.values);
  std::vector<std::uint16_t> rank(N * N, 0);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) rank[a * N + b] = rank_of(table.values, pair_dis(a, b));

  const std::size_t subsets = std::size_t{1} << N;
  table.cost.assign(subsets, 0);
  for (std::size_t s = 1; s < subsets; ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    const std::size_t prev = s & (s - 1);
    std::uint16_t worst = table.cost[prev];
    for (std::uint64_t b = prev; b != 0; b &= b - 1)
      worst = std::max(worst, rank[low * N + static_cast<std::size_t>(std::countr_zero(b))]);
    table.cost[s] = worst;
  }
  return table;
}

/// min over S of max(1 - mass(S), cost(S)). Sets that admit an extra cell at
/// the same cost are skipped: the larger set has at least the same mass.
template <Scalar T, class Mass>
CellSetValue<T> scan_cell_sets(std::size_t n, std::size_t m, const CostTable<T>& table, Mass&& mass) {
  const std::size_t N = n * m;
  const std::size_t subsets = std::size_t{1} << N;
  CellSetValue<T> best{T(1), CellSet(n, m)};
  for (std::size_t s = 1; s < subsets; ++s) {
    const std::uint16_t c = table.cost[s];
    if (!(table.values[c] < best.value)) continue;
    bool extendable = false;
    for (std::size_t cell = 0; cell < N && !extendable; ++cell)
      if (!((s >> cell) & 1U) && table.cost[s | (std::size_t{1} << cell)] == c) extendable = true;
    if (extendable) continue;
    const CellSet S(n, m, s);
    const T value = max_of(T(T(1) - mass(S)), table.values[c]);
    if (value < best.value) best = {value, S};
  }
  return best;
}

}  // namespace detail

/// Box_pi(F_X, F_Y) = min over S of max(1 - pi(S), 2 H_S) at a fixed coupling.
template <Scalar T>
CellSetValue<T> box_at_coupling(const Coupling<T>& pi, const FeatureFamily<T>& FX, const FeatureFamily<T>& FY,
                                std::size_t max_cells = detail::max_enumerated_cells) {
  if (FX.points() != pi.rows() || FY.points() != pi.cols()) throw ShapeMismatch("box_at_coupling: shapes differ");
  detail::check_enumeration_size(pi.rows() * pi.cols(), max_cells);
  const auto table = detail::box_cost_table(FX, FY);
  return detail::scan_cell_sets(pi.rows(), pi.cols(), table, [&](const CellSet& S) { return pi.mass_on(S); });
}

/// min over S of max(1 - pi(S), dis S), enumerating cell sets.
template <Scalar T>
CellSetValue<T> dis_coupling_enumerated(const Coupling<T>& pi, const Matrix<T>& dX, const Matrix<T>& dY,
                                        std::size_t max_cells = detail::max_enumerated_cells) {
  detail::check_enumeration_size(pi.rows() * pi.cols(), max_cells);
  const auto table = detail::distortion_cost_table(dX, dY);
  return detail::scan_cell_sets(pi.rows(), pi.cols(), table, [&](const CellSet& S) { return pi.mass_on(S); });
}

namespace detail {

// Maximum-weight clique by branch and bound over bitmask adjacency. Vertices
// are ordered by decreasing weight; the bound is current weight plus the
// weight of all remaining candidates.
template <Scalar T>
class MaxWeightClique {
 public:
  MaxWeightClique(std::vector<T> weights, std::vector<std::uint64_t> adjacency)
      : w_(std::move(weights)), adj_(std::move(adjacency)) {}

  std::pair<T, std::uint64_t> solve() {
    best_ = 0;
    best_set_ = 0;
    const std::size_t V = w_.size();
    const std::uint64_t all = V == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << V) - 1;
    expand(all, 0, T(0));
    return {best_, best_set_};
  }

 private:
  void expand(std::uint64_t candidates, std::uint64_t chosen, const T& weight) {
    if (weight > best_) {
      best_ = weight;
      best_set_ = chosen;
    }
    T remaining = 0;
    for (std::uint64_t b = candidates; b != 0; b &= b - 1) remaining += w_[static_cast<std::size_t>(std::countr_zero(b))];
    while (candidates != 0) {
      if (!(weight + remaining > best_)) return;
      const auto v = static_cast<std::size_t>(std::countr_zero(candidates));
      candidates &= candidates - 1;
      remaining -= w_[v];
      expand(candidates & adj_[v], chosen | (std::uint64_t{1} << v), T(weight + w_[v]));
    }
  }

  std::vector<T> w_;
  std::vector<std::uint64_t> adj_;
  T best_ = 0;
  std::uint64_t best_set_ = 0;
};

}  // namespace detail

/// dis pi = min over S of max(1 - pi(S), dis S), by a sweep over distortion
/// thresholds with a maximum-mass clique per threshold. Only cells of
/// positive mass are considered (adding a null cell never helps).
template <Scalar T>
CellSetValue<T> dis_coupling(const Coupling<T>& pi, const Matrix<T>& dX, const Matrix<T>& dY,
                             std::size_t max_cells = 16) {
  if (dX.rows() != pi.rows() || dY.rows() != pi.cols()) throw ShapeMismatch("dis_coupling: shapes differ");
  const std::size_t m = pi.cols();
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < pi.rows() * m; ++c)
    if (pi(c / m, c % m) > 0) cells.push_back(c);
  if (cells.size() > max_cells) throw SizeLimit("dis_coupling: too many cells of positive mass");
  // heavier cells first so the bound bites early
  std::stable_sort(cells.begin(), cells.end(),
                   [&](std::size_t a, std::size_t b) { return pi(a / m, a % m) > pi(b / m, b % m); });

  const std::size_t V = cells.size();
  Matrix<T> pair(V, V);
  std::vector<T> thresholds{T(0)};
  for (std::size_t a = 0; a < V; ++a)
    for (std::size_t b = 0; b < V; ++b) {
      pair(a, b) = abs_diff(dX(cells[a] / m, cells[b] / m), dY(cells[a] % m, cells[b] % m));
      thresholds.push_back(pair(a, b));
    }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<T> weights;
  for (std::size_t c : cells) weights.push_back(pi(c / m, c % m));

  CellSetValue<T> best{T(1), CellSet(pi.rows(), m)};
  for (const T& delta : thresholds) {
    if (!(delta < best.value)) break;
    std::vector<std::uint64_t> adj(V, 0);
    for (std::size_t a = 0; a < V; ++a)
      for (std::size_t b = 0; b < V; ++b)
        if (a != b && pair(a, b) <= delta) adj[a] |= std::uint64_t{1} << b;
    auto [mass, chosen] = detail::MaxWeightClique<T>(weights, adj).solve();
    const T value = max_of(T(T(1) - mass), delta);
    if (value < best.value) {
      CellSet S(pi.rows(), m);
      for (std::uint64_t b = chosen; b != 0; b &= b - 1) S.insert(cells[static_cast<std::size_t>(std::countr_zero(b))]);
      best = {value, S};
    }
  }
  return best;
}

template <Scalar T>
struct BoxResult {
  T value;
  Coupling<T> coupling;
  CellSet cells;
  bool exact = true;
};

struct BoxOptions {
  std::size_t max_cells = 16;  // n * m cap for the exact enumeration
  bool fallback_to_heuristic = false;
  std::size_t heuristic_budget = 4000;
  std::uint64_t seed = 0;
};

namespace detail {

template <Scalar T>
BoxResult<T> finish_box(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, CellSetValue<T> best,
                        bool exact) {
  if (best.cells.empty()) return {best.value, product_coupling(mu, nu), best.cells, exact};
  auto mass = max_mass_on_set(mu, nu, best.cells);
  return {best.value, std::move(mass.coupling), best.cells, exact};
}

// Local search over cell sets with an exact objective: greedy growth from
// the empty set, then restarts from seed sets, each improved by single-cell
// toggles and swaps until no move helps. `budget` counts objective
// evaluations.
template <Scalar T>
struct CellSetSearch {
  std::size_t n, m;
  std::function<T(const CellSet&)> objective;
  std::size_t budget;
  std::size_t evaluations = 0;
  CellSetValue<T> best;
  std::vector<T> trace;

  CellSetSearch(std::size_t n_, std::size_t m_, std::function<T(const CellSet&)> f, std::size_t b)
      : n(n_), m(m_), objective(std::move(f)), budget(b), best{T(1), CellSet(n_, m_)} {
    trace.push_back(best.value);
  }

  bool exhausted() const { return evaluations >= budget || !(best.value > 0); }

  T evaluate(const CellSet& S) {
    ++evaluations;
    T v = objective(S);
    if (v < best.value) {
      best = {v, S};
      trace.push_back(v);
    }
    return v;
  }

  void grow() {
    CellSet S(n, m);
    while (S.size() < n * m && !exhausted()) {
      std::optional<T> step;
      std::size_t pick = 0;
      for (std::size_t c = 0; c < n * m && !exhausted(); ++c) {
        if (S.contains(c)) continue;
        CellSet next = S;
        next.insert(c);
        T v = evaluate(next);
        if (!step || v < *step) {
          step = v;
          pick = c;
        }
      }
      if (!step) return;
      S.insert(pick);
    }
  }

  void improve(CellSet S) {
    T current = evaluate(S);
    bool moved = true;
    while (moved && !exhausted()) {
      moved = false;
      for (std::size_t c = 0; c < n * m && !moved && !exhausted(); ++c) {
        CellSet next = S;
        if (S.contains(c)) {
          next.erase(c);
        } else {
          next.insert(c);
        }
        T v = evaluate(next);
        if (v < current) {
          S = next;
          current = v;
          moved = true;
        }
      }
      for (std::size_t out = 0; out < n * m && !moved && !exhausted(); ++out) {
        if (!S.contains(out)) continue;
        for (std::size_t in = 0; in < n * m && !moved && !exhausted(); ++in) {
          if (S.contains(in)) continue;
          CellSet next = S;
          next.erase(out);
          next.insert(in);
          T v = evaluate(next);
          if (v < current) {
            S = next;
            current = v;
            moved = true;
          }
        }
      }
    }
  }
};

}  // namespace detail

template <Scalar T>
struct BoxHeuristicResult {
  T value;
  Coupling<T> coupling;
  CellSet cells;
  std::vector<T> trace;  // best value after each improvement
  std::size_t evaluations = 0;
};

/// Upper bound on the box distance by greedy cell-set growth and local
/// moves, restarted from threshold sets {cells : |f - g| <= h for the pairs
/// of a random assignment cover} and from random sets. Every candidate is
/// scored exactly (max-flow for the mass term).
template <Scalar T>
BoxHeuristicResult<T> box_heuristic(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y,
                                    std::size_t budget = 4000, std::uint64_t seed = 0) {
  const std::size_t n = X.size();
  const std::size_t m = Y.size();
  if (n * m > CellSet::max_cells) throw SizeLimit("box_heuristic supports at most 64 product cells");
  const auto& FX = X.features();
  const auto& FY = Y.features();
  detail::CellSetSearch<T> search(
      n, m,
      [&](const CellSet& S) {
        const T h = T(2 * box_hausdorff(S, FX, FY));
        if (!(h < T(1))) return T(1);
        return max_of(T(T(1) - max_mass_on_set(X.measure(), Y.measure(), S).mass), h);
      },
      budget);

  search.grow();
  std::vector<T> gaps{T(0)};
  for (std::size_t f = 0; f < FX.size(); ++f)
    for (std::size_t g = 0; g < FY.size(); ++g)
      for (std::size_t c = 0; c < n * m; ++c) gaps.push_back(abs_diff(FX(f, c / m), FY(g, c % m)));
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());

  std::mt19937_64 rng(seed);
  std::set<std::pair<std::uint64_t, std::size_t>> tried;
  std::size_t round = 0;
  while (!search.exhausted()) {
    CellSet start(n, m);
    if (round++ % 4 != 3) {
      std::vector<std::size_t> u(FX.size()), v(FY.size());
      for (auto& t : u) t = static_cast<std::size_t>(rng() % FY.size());
      for (auto& t : v) t = static_cast<std::size_t>(rng() % FX.size());
      const std::size_t level = static_cast<std::size_t>(rng() % gaps.size());
      std::uint64_t cover = 0;
      for (std::size_t f = 0; f < u.size(); ++f) cover |= std::uint64_t{1} << (f * FY.size() + u[f]);
      for (std::size_t g = 0; g < v.size(); ++g) cover |= std::uint64_t{1} << (v[g] * FY.size() + g);
      if (!tried.insert({cover, level}).second) {
        if (tried.size() >= 4 * gaps.size() * (std::size_t{1} << std::min<std::size_t>(FX.size() * FY.size(), 20)))
          break;
        continue;
      }
      start = CellSet::full(n, m);
      for (std::size_t c = 0; c < n * m; ++c)
        for (std::uint64_t b = cover; b != 0; b &= b - 1) {
          const auto p = static_cast<std::size_t>(std::countr_zero(b));
          if (abs_diff(FX(p / FY.size(), c / m), FY(p % FY.size(), c % m)) > gaps[level]) start.erase(c);
        }
    } else {
      start = CellSet(n, m, rng());
    }
    search.improve(start);
  }

  auto fin = detail::finish_box(X.measure(), Y.measure(), search.best, false);
  return {fin.value, std::move(fin.coupling), fin.cells, search.trace, search.evaluations};
}

/// Exact box distance by cell-set enumeration with max-flow inner solves.
template <Scalar T>
BoxResult<T> box_exact(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y, const BoxOptions& opt = {}) {
  const std::size_t n = X.size();
  const std::size_t m = Y.size();
  if (n * m > opt.max_cells || n * m > detail::max_enumerated_cells) {
    if (!opt.fallback_to_heuristic) throw SizeLimit("box_exact: n * m exceeds the cell budget");
    auto h = box_heuristic(X, Y, opt.heuristic_budget, opt.seed);
    return {h.value, std::move(h.coupling), h.cells, false};
  }
  const auto table = detail::box_cost_table(X.features(), Y.features());
  auto best = detail::scan_cell_sets(
      n, m, table, [&](const CellSet& S) { return max_mass_on_set(X.measure(), Y.measure(), S).mass; });
  return detail::finish_box(X.measure(), Y.measure(), best, true);
}

/// Exact box distance through assignment covers and thresholds: the best set
/// for a cover c and level h is {cells : |f - g| <= h for all (f, g) in c},
/// so Box = min over (c, h) of max(1 - max_pi pi(A_c(h)), 2h). Independent of
/// the enumeration route and cheaper when n * m is large.
template <Scalar T>
BoxResult<T> box_by_thresholds(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y,
                               std::size_t max_assignment_pairs = 65536) {
  const std::size_t n = X.size();
  const std::size_t m = Y.size();
  const auto& FX = X.features();
  const auto& FY = Y.features();
  const std::size_t kx = FX.size();
  const std::size_t ky = FY.size();
  if (n * m > CellSet::max_cells || kx * ky > 64) throw SizeLimit("box_by_thresholds: instance too large");
  if (detail::saturating_product(detail::saturating_power(ky, kx), detail::saturating_power(kx, ky)) >
      max_assignment_pairs)
    throw BudgetExceeded("box_by_thresholds: assignment space exceeds the budget");

  std::vector<T> gaps{T(0)};
  for (std::size_t f = 0; f < kx; ++f)
    for (std::size_t g = 0; g < ky; ++g)
      for (std::size_t c = 0; c < n * m; ++c) gaps.push_back(abs_diff(FX(f, c / m), FY(g, c % m)));
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());

  CellSetValue<T> best{T(1), CellSet(n, m)};
  std::set<std::uint64_t> seen;
  for (std::uint64_t cover : detail::minimal_covers(kx, ky)) {
    for (const T& h : gaps) {
      if (!(2 * h < best.value)) break;
      CellSet A = CellSet::full(n, m);
      for (std::size_t c = 0; c < n * m; ++c)
        for (std::uint64_t b = cover; b != 0; b &= b - 1) {
          const auto p = static_cast<std::size_t>(std::countr_zero(b));
          if (abs_diff(FX(p / ky, c / m), FY(p % ky, c % m)) > h) A.erase(c);
        }
      if (A.empty() || !seen.insert(A.bits()).second) continue;
      const T value = max_of(T(T(1) - max_mass_on_set(X.measure(), Y.measure(), A).mass), T(2 * h));
      if (value < best.value) best = {value, A};
    }
  }
  return detail::finish_box(X.measure(), Y.measure(), best, true);
}

/// Box distance between finite mm-spaces: min over S of
/// max(1 - max_pi pi(S), dis S).
template <Scalar T>
BoxResult<T> box_mm_exact(const MmSpace<T>& MX, const MmSpace<T>& MY, std::size_t max_cells = 16) {
  const std::size_t n = MX.size();
  const std::size_t m = MY.size();
  detail::check_enumeration_size(n * m, max_cells);
  const auto table = detail::distortion_cost_table(MX.dist(), MY.dist());
  auto best = detail::scan_cell_sets(
      n, m, table, [&](const CellSet& S) { return max_mass_on_set(MX.measure(), MY.measure(), S).mass; });
  return detail::finish_box(MX.measure(), MY.measure(), best, true);
}

/// Heuristic counterpart of box_mm_exact (same local search, distortion cost).
template <Scalar T>
BoxHeuristicResult<T> box_mm_heuristic(const MmSpace<T>& MX, const MmSpace<T>& MY, std::size_t budget = 4000,
                                       std::uint64_t seed = 0) {
  const std::size_t n = MX.size();
  const std::size_t m = MY.size();
  if (n * m > CellSet::max_cells) throw SizeLimit("box_mm_heuristic supports at most 64 product cells");
  detail::CellSetSearch<T> search(
      n, m,
      [&](const CellSet& S) {
        const T d = distortion(S, MX.dist(), MY.dist());
        if (!(d < T(1))) return T(1);
        return max_of(T(T(1) - max_mass_on_set(MX.measure(), MY.measure(), S).mass), d);
      },
      budget);
  search.grow();
  std::mt19937_64 rng(seed);
  while (!search.exhausted()) search.improve(CellSet(n, m, rng()));
  auto fin = detail::finish_box(MX.measure(), MY.measure(), search.best, false);
  return {fin.value, std::move(fin.coupling), fin.cells, search.trace, search.evaluations};
}

}  // namespace gds
