#pragma once

// Observable distance between finite geometric data sets, computed as the
// minimum over couplings of the Hausdorff distance (under the coupling's Ky
// Fan metric) between the two lifted feature families.
//
// d_conc^pi <= eps holds iff there are assignments u: F_X -> F_Y and
// v: F_Y -> F_X with pi(B_{f,g}(eps)) <= eps for every pair (f, g) they use,
// where B_{f,g}(eps) = {(x, y) : |f(x) - g(y)| > eps}. The pairs used by
// (u, v) form an edge cover of F_X x F_Y; only minimal covers matter, and for
// a fixed cover the exceed sets are constant on each interval between
// consecutive gap values, so the minimum is an exact LP per interval.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "gds/cells.hpp"
#include "gds/coupling.hpp"
#include "gds/errors.hpp"
#include "gds/metrics.hpp"
#include "gds/model.hpp"
#include "gds/scalar.hpp"

namespace gds {

/// Hausdorff distance under the Ky Fan metric of pi between F_X o pr1 and
/// F_Y o pr2.
template <Scalar T>
T dconc_at_coupling(const FeatureFamily<T>& FX, const FeatureFamily<T>& FY, const Coupling<T>& pi) {
  if (FX.points() != pi.rows() || FY.points() != pi.cols()) throw ShapeMismatch("dconc_at_coupling: shapes differ");
  return hausdorff(FX.size(), FY.size(),
                   [&](std::size_t f, std::size_t g) { return ky_fan_coupling<T>(pi, FX.row(f), FY.row(g)); });
}

template <Scalar T>
T dconc_at_coupling(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y, const Coupling<T>& pi) {
  return dconc_at_coupling(X.features(), Y.features(), pi);
}

/// For each f in F_X, the first g in F_Y minimizing the Ky Fan distance
/// under pi.
template <Scalar T>
std::vector<std::size_t> feature_transfer(const FeatureFamily<T>& FX, const FeatureFamily<T>& FY,
                                          const Coupling<T>& pi) {
  std::vector<std::size_t> u(FX.size(), 0);
  for (std::size_t f = 0; f < FX.size(); ++f) {
    T best = ky_fan_coupling<T>(pi, FX.row(f), FY.row(0));
    for (std::size_t g = 1; g < FY.size(); ++g) {
      T v = ky_fan_coupling<T>(pi, FX.row(f), FY.row(g));
      if (v < best) {
        best = v;
        u[f] = g;
      }
    }
  }
  return u;
}

template <Scalar T>
std::vector<std::size_t> feature_transfer(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y,
                                          const Coupling<T>& pi) {
  return feature_transfer(X.features(), Y.features(), pi);
}

namespace detail {

/// Shared machinery for the exact search and the heuristic: gap levels,
/// exceed sets per feature pair and level, and a cache of the interval LPs.
template <Scalar T>
class DconcSolver {
 public:
  struct CoverSolution {
    T value;
    Coupling<T> coupling;
  };

  DconcSolver(const FeatureFamily<T>& FX, const DiscreteMeasure<T>& mu, const FeatureFamily<T>& FY,
              const DiscreteMeasure<T>& nu)
      : FX_(FX), FY_(FY), mu_(mu), nu_(nu), n_(mu.size()), m_(nu.size()) {
    if (FX.points() != n_ || FY.points() != m_) throw ShapeMismatch("feature families do not match the measures");
    if (n_ * m_ > CellSet::max_cells) throw SizeLimit("observable distance supports at most 64 product cells");
    if (FX.size() * FY.size() > 64) throw SizeLimit("observable distance supports at most 64 feature pairs");

    levels_.push_back(T(0));
    for (std::size_t f = 0; f < FX.size(); ++f)
      for (std::size_t g = 0; g < FY.size(); ++g)
        for (std::size_t x = 0; x < n_; ++x)
          for (std::size_t y = 0; y < m_; ++y) {
            T gap = abs_diff(FX(f, x), FY(g, y));
            if (gap < 1) levels_.push_back(std::move(gap));
          }
    std::sort(levels_.begin(), levels_.end());
    levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());

    const std::size_t L = levels_.size();
    exceed_.assign(FX.size() * FY.size() * L, 0);
    for (std::size_t f = 0; f < FX.size(); ++f)
      for (std::size_t g = 0; g < FY.size(); ++g)
        for (std::size_t x = 0; x < n_; ++x)
          for (std::size_t y = 0; y < m_; ++y) {
            const T gap = abs_diff(FX(f, x), FY(g, y));
            const std::uint64_t bit = std::uint64_t{1} << (x * m_ + y);
            // |f - g| > levels[i] for every level strictly below the gap
            for (std::size_t i = 0; i < L && levels_[i] < gap; ++i) exceed_[(f * FY.size() + g) * L + i] |= bit;
          }
  }

  std::size_t x_features() const { return FX_.size(); }
  std::size_t y_features() const { return FY_.size(); }
  std::size_t lp_solves() const { return lp_solves_; }
  const std::vector<T>& levels() const { return levels_; }

  /// Minimum of max(levels[i], max_k pi(B_k)) over couplings, B_k the exceed
  /// sets at levels[i] of the pairs in `cover` (bit f * |F_Y| + g).
  const CoverSolution& level_solve(std::uint64_t cover, std::size_t i) {
    const std::size_t L = levels_.size();
    std::vector<std::uint64_t> sets;
    for (std::uint64_t b = cover; b != 0; b &= b - 1) {
      const auto pair = static_cast<std::size_t>(std::countr_zero(b));
      const std::uint64_t s = exceed_[pair * L + i];
      if (s != 0) sets.push_back(s);
    }
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    // a set contained in another is implied by it
    std::vector<std::uint64_t> maximal;
    for (std::uint64_t s : sets) {
      bool dominated = false;
      for (std::uint64_t t : sets)
        if (t != s && (s & t) == s) dominated = true;
      if (!dominated) maximal.push_back(s);
    }

    auto key = std::make_pair(i, maximal);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    if (maximal.empty()) {
      return cache_.emplace(std::move(key), CoverSolution{levels_[i], product_coupling(mu_, nu_)}).first->second;
    }
    SetMassProgram<T> prog{mu_, nu_, {}, ProgramMode::minimize_common_cap, CellSet(n_, m_), levels_[i]};
    for (std::uint64_t s : maximal) prog.constraints.push_back({CellSet(n_, m_, s), T(1)});
    ++lp_solves_;
    ProgramResult<T> r = feasibility_lp(prog);
    if (!r.feasible) throw InfeasibleMarginals("set-mass program unexpectedly infeasible");
    return cache_.emplace(std::move(key), CoverSolution{*r.optimum, std::move(*r.coupling)}).first->second;
  }

  /// Exact minimum over couplings of the largest Ky Fan distance among the
  /// pairs of `cover`. With `beat`, returns nullopt unless the minimum is
  /// strictly below it.
  std::optional<CoverSolution> solve_cover(std::uint64_t cover, const std::optional<T>& beat = std::nullopt) {
    const std::size_t L = levels_.size();
    auto next = [&](std::size_t i) { return i + 1 < L ? levels_[i + 1] : T(1); };
    auto below_next = [&](std::size_t i) { return level_solve(cover, i).value < next(i); };

    std::size_t hi = L - 1;
    if (beat) {
      if (!(*beat > 0)) return std::nullopt;
      // last interval with points strictly below the bound
      hi = static_cast<std::size_t>(std::lower_bound(levels_.begin(), levels_.end(), *beat) - levels_.begin()) - 1;
      if (!(level_solve(cover, hi).value < *beat)) return std::nullopt;
    } else if (!below_next(hi)) {
      return CoverSolution{T(1), product_coupling(mu_, nu_)};
    }
    std::size_t lo = 0;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (below_next(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return level_solve(cover, lo);
  }

  std::uint64_t cover_of(const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) const {
    std::uint64_t mask = 0;
    for (std::size_t f = 0; f < u.size(); ++f) mask |= std::uint64_t{1} << (f * FY_.size() + u[f]);
    for (std::size_t g = 0; g < v.size(); ++g) mask |= std::uint64_t{1} << (v[g] * FY_.size() + g);
    return mask;
  }

  /// Cover used by the best assignments for a fixed coupling.
  std::uint64_t greedy_cover(const Coupling<T>& pi) const {
    return cover_of(feature_transfer(FX_, FY_, pi), feature_transfer(FY_, FX_, pi.transposed()));
  }

 private:
  const FeatureFamily<T>& FX_;
  const FeatureFamily<T>& FY_;
  const DiscreteMeasure<T>& mu_;
  const DiscreteMeasure<T>& nu_;
  std::size_t n_, m_;
  std::vector<T> levels_;
  std::vector<std::uint64_t> exceed_;
  std::map<std::pair<std::size_t, std::vector<std::uint64_t>>, CoverSolution> cache_;
  std::size_t lp_solves_ = 0;
};

// a^b, saturating at the max of size_t
inline std::size_t saturating_power(std::size_t a, std::size_t b) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < b; ++i) {
    if (a != 0 && out > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
    out *= a;
  }
  return out;
}

inline std::size_t saturating_product(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

// Decodes index `code` into a map {0..k-1} -> {0..base-1}.
inline std::vector<std::size_t> decode_assignment(std::size_t code, std::size_t k, std::size_t base) {
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = code % base;
    code /= base;
  }
  return out;
}

/// Minimal covers of F_X x F_Y produced by assignment pairs (u, v), ordered by
/// size then mask.
inline std::vector<std::uint64_t> minimal_covers(std::size_t kx, std::size_t ky) {
  const std::size_t us = saturating_power(ky, kx);
  const std::size_t vs = saturating_power(kx, ky);
  std::set<std::uint64_t> all;
  for (std::size_t a = 0; a < us; ++a) {
    const auto u = decode_assignment(a, kx, ky);
    std::uint64_t base = 0;
    for (std::size_t f = 0; f < kx; ++f) base |= std::uint64_t{1} << (f * ky + u[f]);
    for (std::size_t b = 0; b < vs; ++b) {
      const auto v = decode_assignment(b, ky, kx);
      std::uint64_t mask = base;
      for (std::size_t g = 0; g < ky; ++g) mask |= std::uint64_t{1} << (v[g] * ky + g);
      all.insert(mask);
    }
  }
  std::vector<std::uint64_t> sorted(all.begin(), all.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](std::uint64_t a, std::uint64_t b) { return std::popcount(a) < std::popcount(b); });
  std::vector<std::uint64_t> out;
  for (std::uint64_t c : sorted) {
    bool superset = false;
    for (std::uint64_t k : out)
      if ((c & k) == k) superset = true;
    if (!superset) out.push_back(c);
  }
  return out;
}

}  // namespace detail

template <Scalar T>
struct DconcResult {
  T value;
  Coupling<T> coupling;
  std::vector<std::size_t> u;  // F_X -> F_Y
  std::vector<std::size_t> v;  // F_Y -> F_X
  bool exact = true;           // false when the heuristic stood in
  std::size_t lp_solves = 0;
};

struct DconcOptions {
  /// Cap on |F_Y|^|F_X| * |F_X|^|F_Y| for the exact search.
  std::size_t max_assignment_pairs = 65536;
  /// On budget overflow run the heuristic instead of throwing.
  bool fallback_to_heuristic = false;
  std::size_t heuristic_budget = 2000;
  std::uint64_t seed = 0;
};

template <Scalar T>
struct DconcHeuristicResult {
  T value;
  Coupling<T> coupling;
  std::vector<T> trace;  // best value after each improvement
  std::size_t lp_solves = 0;
};

/// Alternating search: for a cover (pair of assignments) solve the exact
/// coupling LP; for that coupling recompute the best assignments; repeat
/// until the cover repeats, then restart from a random cover. `budget`
/// bounds the number of LP solves. The value returned is d_conc^pi at the
/// best coupling found, so it is always an upper bound.
template <Scalar T>
DconcHeuristicResult<T> dconc_heuristic(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y,
                                        std::size_t budget = 2000, std::uint64_t seed = 0) {
  detail::DconcSolver<T> solver(X.features(), X.measure(), Y.features(), Y.measure());
  const std::size_t kx = X.features().size();
  const std::size_t ky = Y.features().size();
  std::mt19937_64 rng(seed);

  Coupling<T> start = product_coupling(X.measure(), Y.measure());
  DconcHeuristicResult<T> out{dconc_at_coupling(X, Y, start), start, {}, 0};
  out.trace.push_back(out.value);

  auto random_cover = [&] {
    std::vector<std::size_t> u(kx), v(ky);
    for (auto& t : u) t = static_cast<std::size_t>(rng() % ky);
    for (auto& t : v) t = static_cast<std::size_t>(rng() % kx);
    return solver.cover_of(u, v);
  };

  std::set<std::uint64_t> visited;
  std::uint64_t cover = solver.greedy_cover(start);
  while (solver.lp_solves() < budget && out.value > 0) {
    if (visited.count(cover) != 0) {
      std::size_t tries = 0;
      do {
        cover = random_cover();
      } while (visited.count(cover) != 0 && ++tries < 256);
      if (visited.count(cover) != 0) break;
    }
    visited.insert(cover);
    auto r = solver.solve_cover(cover, out.value);
    if (!r) continue;  // cannot improve; next round restarts
    T value = dconc_at_coupling(X, Y, r->coupling);
    if (value < out.value) {
      out.value = value;
      out.coupling = r->coupling;
      out.trace.push_back(value);
    }
    cover = solver.greedy_cover(r->coupling);
  }
  out.lp_solves = solver.lp_solves();
  return out;
}

/// Exact observable distance with a witness coupling and assignments.
template <Scalar T>
DconcResult<T> dconc_exact(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y, const DconcOptions& opt = {}) {
  const std::size_t kx = X.features().size();
  const std::size_t ky = Y.features().size();
  // a one-point side leaves only the product coupling
  if (X.size() == 1 || Y.size() == 1) {
    auto pi = product_coupling(X.measure(), Y.measure());
    return {dconc_at_coupling(X, Y, pi), pi, feature_transfer(X, Y, pi),
            feature_transfer(Y.features(), X.features(), pi.transposed()), true, 0};
  }
  const std::size_t pairs =
      detail::saturating_product(detail::saturating_power(ky, kx), detail::saturating_power(kx, ky));
  if (pairs > opt.max_assignment_pairs) {
    if (!opt.fallback_to_heuristic) throw BudgetExceeded("dconc_exact: assignment space exceeds the budget");
    auto h = dconc_heuristic(X, Y, opt.heuristic_budget, opt.seed);
    DconcResult<T> out{h.value, h.coupling, feature_transfer(X, Y, h.coupling),
                       feature_transfer(Y.features(), X.features(), h.coupling.transposed()), false, h.lp_solves};
    return out;
  }

  detail::DconcSolver<T> solver(X.features(), X.measure(), Y.features(), Y.measure());
  Coupling<T> best_pi = product_coupling(X.measure(), Y.measure());
  T best = dconc_at_coupling(X, Y, best_pi);
  for (std::uint64_t cover : detail::minimal_covers(kx, ky)) {
    if (!(best > 0)) break;
    auto r = solver.solve_cover(cover, best);
    if (r) {
      best = r->value;
      best_pi = r->coupling;
    }
  }
  DconcResult<T> out{dconc_at_coupling(X, Y, best_pi), best_pi, feature_transfer(X, Y, best_pi),
                     feature_transfer(Y.features(), X.features(), best_pi.transposed()), true, solver.lp_solves()};
  return out;
}

/// min over couplings pi and g in F_Y of the Ky Fan distance between
/// witness o pr1 and g o pr2. A lower bound on d_conc(X, Y) whenever the
/// witness belongs to F_X.
template <Scalar T>
T dconc_lower_witness(const GeometricDataSet<T>& X, const GeometricDataSet<T>& Y, std::span<const T> witness) {
  if (witness.size() != X.size()) throw ShapeMismatch("witness must be a function on X");
  if (!is_lipschitz(witness, X.metric())) throw WitnessNotLipschitz("witness is not 1-Lipschitz on X");
  const FeatureFamily<T> H(Matrix<T>::from_rows({std::vector<T>(witness.begin(), witness.end())}));
  detail::DconcSolver<T> solver(H, X.measure(), Y.features(), Y.measure());
  std::optional<T> best;
  for (std::size_t g = 0; g < Y.features().size(); ++g) {
    auto r = solver.solve_cover(std::uint64_t{1} << g, best);
    if (r) best = r->value;
    if (best && !(*best > 0)) break;
  }
  return best ? *best : T(1);
}

/// Geometric data set carrying the distance functions of M together with
/// `samples` further 1-Lipschitz functions. Distances computed on such
/// finite subfamilies of Lip1 are estimates of the mm-space values, not
/// certified bounds in the upper direction.
template <Scalar T>
GeometricDataSet<T> mm_sampled_gds(const MmSpace<T>& M, std::size_t samples, std::uint64_t seed) {
  return GeometricDataSet<T>(sample_lip1(M, samples, seed), M.measure());
}

}  // namespace gds
