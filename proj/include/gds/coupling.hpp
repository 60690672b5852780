#pragma once

// Optimization over the transportation polytope Pi(mu, nu).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "gds/cells.hpp"
#include "gds/errors.hpp"
#include "gds/matrix.hpp"
#include "gds/max_flow.hpp"
#include "gds/metrics.hpp"
#include "gds/model.hpp"
#include "gds/scalar.hpp"
#include "gds/simplex.hpp"

namespace gds {

template <Scalar T>
Coupling<T> product_coupling(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu) {
  Matrix<T> m(mu.size(), nu.size());
  for (std::size_t x = 0; x < mu.size(); ++x)
    for (std::size_t y = 0; y < nu.size(); ++y) m(x, y) = mu[x] * nu[y];
  return Coupling<T>(std::move(m), mu, nu);
}

/// Identity coupling of a measure with itself.
template <Scalar T>
Coupling<T> diagonal_coupling(const DiscreteMeasure<T>& mu) {
  Matrix<T> m(mu.size(), mu.size());
  for (std::size_t x = 0; x < mu.size(); ++x) m(x, x) = mu[x];
  return Coupling<T>(std::move(m), mu, mu);
}

template <Scalar T>
struct MassOnSet {
  T mass;
  Coupling<T> coupling;
};

/// max over couplings of pi(S), with a witness. Bipartite max-flow with
/// unbounded capacity on the cells of S; the unrouted residual marginals are
/// then completed by their (normalized) product, which cannot add mass to S
/// because that would be an augmenting path.
template <Scalar T>
MassOnSet<T> max_mass_on_set(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const CellSet& S) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  if (S.rows() != n || S.cols() != m) throw ShapeMismatch("max_mass_on_set: cell set shape");
  const std::size_t source = n + m;
  const std::size_t sink = n + m + 1;
  MaxFlow<T> flow(n + m + 2);
  for (std::size_t x = 0; x < n; ++x) flow.add_edge(source, x, mu[x]);
  for (std::size_t y = 0; y < m; ++y) flow.add_edge(n + y, sink, nu[y]);
  std::vector<std::pair<std::size_t, std::size_t>> cell_edges;
  for (std::size_t c : S.cells()) cell_edges.emplace_back(c, flow.add_edge(c / m, n + c % m, T(2)));
  const T routed = flow.run(source, sink);

  Matrix<T> pi(n, m);
  std::vector<T> row_left(mu.weights().begin(), mu.weights().end());
  std::vector<T> col_left(nu.weights().begin(), nu.weights().end());
  for (const auto& [cell, edge] : cell_edges) {
    const T& f = flow.flow(edge);
    pi(cell / m, cell % m) = f;
    row_left[cell / m] -= f;
    col_left[cell % m] -= f;
  }
  const T residual = T(1) - routed;
  if (residual > 0) {
    for (std::size_t x = 0; x < n; ++x) {
      if (!(row_left[x] > 0)) continue;
      for (std::size_t y = 0; y < m; ++y)
        if (col_left[y] > 0) pi(x, y) += row_left[x] * col_left[y] / residual;
    }
  }
  return {routed, Coupling<T>(std::move(pi), mu, nu)};
}

// ---------------------------------------------------------------------------
// Set-mass programs solved by the exact simplex.

enum class ProgramMode { feasibility, minimize_common_cap, maximize_mass_on_set };

template <Scalar T>
struct SetMassProgram {
  struct Constraint {
    CellSet cells;
    T cap = 1;  // ignored in minimize_common_cap mode
  };

  DiscreteMeasure<T> mu;
  DiscreteMeasure<T> nu;
  std::vector<Constraint> constraints;
  ProgramMode mode = ProgramMode::feasibility;
  CellSet objective_cells;  // maximize_mass_on_set only
  T common_cap_floor = 0;   // minimize_common_cap: optimum is clamped below
};

template <Scalar T>
struct ProgramResult {
  bool feasible = false;
  std::optional<Coupling<T>> coupling;
  std::optional<T> optimum;
};

/// Feasibility / min common cap / max mass over Pi(mu, nu) under set-mass
/// caps pi(B_k) <= cap_k (or <= t). Exact for rationals; Bland's rule.
template <Scalar T>
ProgramResult<T> feasibility_lp(const SetMassProgram<T>& prog) {
  const std::size_t n = prog.mu.size();
  const std::size_t m = prog.nu.size();
  {
    T total_mu = 0, total_nu = 0;
    for (const T& w : prog.mu.weights()) total_mu += w;
    for (const T& w : prog.nu.weights()) total_nu += w;
    if (abs_diff(total_mu, total_nu) > scalar_traits<T>::tolerance())
      throw InfeasibleMarginals("marginals carry different total mass");
  }
  for (const auto& c : prog.constraints) {
    if (c.cells.rows() != n || c.cells.cols() != m) throw ShapeMismatch("constraint cell set shape");
    if (prog.mode != ProgramMode::minimize_common_cap && (c.cap < 0 || c.cap > 1))
      throw InvalidInput("set-mass caps must lie in [0, 1]");
  }

  LinearProgram<T> lp;
  for (std::size_t c = 0; c < n * m; ++c) lp.add_variable();
  std::optional<std::size_t> cap_var;
  if (prog.mode == ProgramMode::minimize_common_cap) cap_var = lp.add_variable(T(1));
  if (prog.mode == ProgramMode::maximize_mass_on_set) {
    if (prog.objective_cells.rows() != n || prog.objective_cells.cols() != m)
      throw ShapeMismatch("objective cell set shape");
    for (std::size_t c : prog.objective_cells.cells()) lp.objective[c] = T(-1);
  }

  for (std::size_t x = 0; x < n; ++x) {
    typename LinearProgram<T>::Row row;
    for (std::size_t y = 0; y < m; ++y) row.terms.emplace_back(x * m + y, T(1));
    row.rhs = prog.mu[x];
    lp.rows.push_back(std::move(row));
  }
  // The last column constraint is implied by the others and total mass.
  for (std::size_t y = 0; y + 1 < m; ++y) {
    typename LinearProgram<T>::Row row;
    for (std::size_t x = 0; x < n; ++x) row.terms.emplace_back(x * m + y, T(1));
    row.rhs = prog.nu[y];
    lp.rows.push_back(std::move(row));
  }
  for (const auto& c : prog.constraints) {
    if (c.cells.empty()) continue;
    typename LinearProgram<T>::Row row;
    row.sense = RowSense::less_equal;
    for (std::size_t cell : c.cells.cells()) row.terms.emplace_back(cell, T(1));
    if (cap_var) {
      // pi(B) - t' <= floor, where t = floor + t'
      row.terms.emplace_back(*cap_var, T(-1));
      row.rhs = prog.common_cap_floor;
    } else {
      row.rhs = c.cap;
    }
    lp.rows.push_back(std::move(row));
  }

  const LpSolution<T> sol = solve_lp(lp);
  ProgramResult<T> out;
  if (sol.status != LpStatus::optimal) return out;
  out.feasible = true;
  Matrix<T> pi(n, m);
  for (std::size_t c = 0; c < n * m; ++c) pi(c / m, c % m) = sol.x[c];
  out.coupling = Coupling<T>(std::move(pi), prog.mu, prog.nu);
  switch (prog.mode) {
    case ProgramMode::feasibility:
      break;
    case ProgramMode::minimize_common_cap:
      out.optimum = prog.common_cap_floor + sol.x[*cap_var];
      break;
    case ProgramMode::maximize_mass_on_set:
      out.optimum = T(-sol.value);
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gluing.

template <Scalar T>
struct GluedCoupling {
  std::size_t n = 0, m = 0, l = 0;
  std::vector<T> mass;  // index (x * m + y) * l + z
  Coupling<T> composed; // (pr_13)_* rho

  const T& operator()(std::size_t x, std::size_t y, std::size_t z) const { return mass[(x * m + y) * l + z]; }

  Matrix<T> marginal_12() const {
    Matrix<T> out(n, m);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < m; ++y)
        for (std::size_t z = 0; z < l; ++z) out(x, y) += (*this)(x, y, z);
    return out;
  }

  Matrix<T> marginal_23() const {
    Matrix<T> out(m, l);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < m; ++y)
        for (std::size_t z = 0; z < l; ++z) out(y, z) += (*this)(x, y, z);
    return out;
  }
};

/// rho(x, y, z) = pi_xy(x, y) pi_yz(y, z) / nu(y), with 0/0 = 0.
template <Scalar T>
GluedCoupling<T> glue(const Coupling<T>& pi_xy, const Coupling<T>& pi_yz) {
  if (pi_xy.cols() != pi_yz.rows()) throw MarginalMismatch("glue: middle spaces differ in size");
  const std::vector<T> shared_a = pi_xy.second_marginal();
  const std::vector<T> shared_b = pi_yz.first_marginal();
  for (std::size_t y = 0; y < shared_a.size(); ++y)
    if (abs_diff(shared_a[y], shared_b[y]) > scalar_traits<T>::tolerance())
      throw MarginalMismatch("glue: shared marginal differs");

  GluedCoupling<T> out;
  out.n = pi_xy.rows();
  out.m = pi_xy.cols();
  out.l = pi_yz.cols();
  out.mass.assign(out.n * out.m * out.l, T(0));
  Matrix<T> composed(out.n, out.l);
  for (std::size_t y = 0; y < out.m; ++y) {
    if (!(shared_a[y] > 0)) continue;
    for (std::size_t x = 0; x < out.n; ++x) {
      if (pi_xy(x, y) == 0) continue;
      for (std::size_t z = 0; z < out.l; ++z) {
        const T v = pi_xy(x, y) * pi_yz(y, z) / shared_a[y];
        out.mass[(x * out.m + y) * out.l + z] = v;
        composed(x, z) += v;
      }
    }
  }
  const DiscreteMeasure<T> mu(pi_xy.first_marginal());
  const DiscreteMeasure<T> lambda(pi_yz.second_marginal());
  out.composed = Coupling<T>(std::move(composed), mu, lambda);
  return out;
}

/// l-infinity product metric on X x Y, cells in CellSet order.
template <Scalar T>
Matrix<T> product_metric(const Matrix<T>& dX, const Matrix<T>& dY) {
  const std::size_t n = dX.rows();
  const std::size_t m = dY.rows();
  Matrix<T> d(n * m, n * m);
  for (std::size_t a = 0; a < n * m; ++a)
    for (std::size_t b = 0; b < n * m; ++b) d(a, b) = max_of(dX(a / m, b / m), dY(a % m, b % m));
  return d;
}

/// Prohorov distance between two couplings on X x Y with the l-infinity metric.
template <Scalar T>
T coupling_prohorov(const Coupling<T>& pi, const Coupling<T>& rho, const Matrix<T>& dX, const Matrix<T>& dY,
                    ProhorovMethod method = ProhorovMethod::automatic) {
  if (pi.rows() != rho.rows() || pi.cols() != rho.cols() || dX.rows() != pi.rows() || dY.rows() != pi.cols())
    throw ShapeMismatch("coupling_prohorov: shapes differ");
  return prohorov<T>(product_metric(dX, dY), pi.flat(), rho.flat(), method);
}

// ---------------------------------------------------------------------------
// Enumeration (oracle use only).

enum class EnumerationMode { vertices, grid };

namespace detail {

// Solves the transportation equations on an acyclic support by leaf peeling.
// Returns nullopt if the support has a cycle or the solution is infeasible.
template <Scalar T>
std::optional<Matrix<T>> solve_on_forest(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                                         const std::vector<std::size_t>& support) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  // cycle check with union-find over the n + m nodes
  std::vector<std::size_t> parent(n + m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t c : support) {
    const std::size_t a = find(c / m);
    const std::size_t b = find(n + c % m);
    if (a == b) return std::nullopt;
    parent[a] = b;
  }

  std::vector<T> residual(n + m);
  for (std::size_t x = 0; x < n; ++x) residual[x] = mu[x];
  for (std::size_t y = 0; y < m; ++y) residual[n + y] = nu[y];
  std::vector<bool> assigned(support.size(), false);
  std::vector<std::size_t> degree(n + m, 0);
  for (std::size_t c : support) {
    ++degree[c / m];
    ++degree[n + c % m];
  }
  Matrix<T> pi(n, m);
  std::size_t remaining = support.size();
  while (remaining > 0) {
    bool progressed = false;
    for (std::size_t e = 0; e < support.size(); ++e) {
      if (assigned[e]) continue;
      const std::size_t a = support[e] / m;
      const std::size_t b = n + support[e] % m;
      std::size_t leaf;
      if (degree[a] == 1) {
        leaf = a;
      } else if (degree[b] == 1) {
        leaf = b;
      } else {
        continue;
      }
      const T value = residual[leaf];
      if (value < 0) return std::nullopt;
      pi(a, b - n) = value;
      residual[a] -= value;
      residual[b] -= value;
      --degree[a];
      --degree[b];
      assigned[e] = true;
      --remaining;
      progressed = true;
    }
    if (!progressed) return std::nullopt;
  }
  for (const T& r : residual)
    if (abs_value(r) > scalar_traits<T>::tolerance()) return std::nullopt;
  return pi;
}

template <Scalar T>
Matrix<T> north_west_corner(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                            const std::vector<std::size_t>& row_order, const std::vector<std::size_t>& col_order) {
  Matrix<T> pi(mu.size(), nu.size());
  std::vector<T> r(mu.weights().begin(), mu.weights().end());
  std::vector<T> c(nu.weights().begin(), nu.weights().end());
  std::size_t i = 0, j = 0;
  while (i < row_order.size() && j < col_order.size()) {
    const std::size_t x = row_order[i];
    const std::size_t y = col_order[j];
    const T v = min_of(r[x], c[y]);
    pi(x, y) += v;
    r[x] -= v;
    c[y] -= v;
    if (!(r[x] > 0)) {
      ++i;
    } else {
      ++j;
    }
  }
  return pi;
}

}  // namespace detail

/// Vertex mode lists every vertex of Pi(mu, nu) (supports that are spanning
/// forests); requires n * m <= 9. Grid mode walks pairwise mixtures
/// (k / resolution) of a fixed generator set (product coupling and
/// north-west-corner vertices) and works at any size.
template <Scalar T>
std::vector<Coupling<T>> enumerate_couplings(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                                             EnumerationMode mode = EnumerationMode::vertices,
                                             std::size_t resolution = 4) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  std::vector<Coupling<T>> out;
  if (mode == EnumerationMode::vertices) {
    if (n * m > 9) throw SizeLimit("vertex enumeration supports n * m <= 9");
    const std::size_t cells = n * m;
    const std::size_t max_support = n + m - 1;
    std::vector<Matrix<T>> seen;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << cells); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) > max_support) continue;
      std::vector<std::size_t> support;
      for (std::size_t c = 0; c < cells; ++c)
        if ((mask >> c) & 1U) support.push_back(c);
      auto pi = detail::solve_on_forest(mu, nu, support);
      if (!pi) continue;
      if (std::find(seen.begin(), seen.end(), *pi) != seen.end()) continue;
      seen.push_back(*pi);
      out.emplace_back(*pi, mu, nu);
    }
    return out;
  }

  if (resolution == 0) throw InvalidInput("grid resolution must be positive");
  std::vector<Matrix<T>> generators{product_coupling(mu, nu).matrix()};
  std::vector<std::size_t> rows(n), cols(m);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  std::size_t produced = 0;
  do {
    std::vector<std::size_t> c = cols;
    std::size_t inner = 0;
    do {
      Matrix<T> v = detail::north_west_corner(mu, nu, rows, c);
      if (std::find(generators.begin(), generators.end(), v) == generators.end()) generators.push_back(std::move(v));
    } while (++inner < 6 && std::next_permutation(c.begin(), c.end()));
  } while (++produced < 6 && std::next_permutation(rows.begin(), rows.end()));

  for (const Matrix<T>& g : generators) out.emplace_back(g, mu, nu);
  for (std::size_t a = 0; a < generators.size(); ++a) {
    for (std::size_t b = a + 1; b < generators.size(); ++b) {
      for (std::size_t k = 1; k < resolution; ++k) {
        const T w = from_ratio<T>(static_cast<std::int64_t>(k), static_cast<std::int64_t>(resolution));
        Matrix<T> mix(n, m);
        for (std::size_t x = 0; x < n; ++x)
          for (std::size_t y = 0; y < m; ++y)
            mix(x, y) = w * generators[a](x, y) + (T(1) - w) * generators[b](x, y);
        out.emplace_back(std::move(mix), mu, nu);
      }
    }
  }
  return out;
}

}  // namespace gds
