#pragma once

// Dense two-phase tableau simplex with Bland's rule. Exact over rationals;
// also instantiable over double with a small pivot tolerance. Problems here
// are tiny transportation-type programs, so the tableau is kept dense and
// pivots skip zero entries.

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "gds/scalar.hpp"

namespace gds {

enum class RowSense { equal, less_equal };

enum class LpStatus { optimal, infeasible, unbounded };

template <Scalar T>
struct LinearProgram {
  struct Row {
    std::vector<std::pair<std::size_t, T>> terms;
    RowSense sense = RowSense::equal;
    T rhs = 0;
  };

  std::size_t variables = 0;
  std::vector<T> objective;  // minimized; missing entries are zero
  std::vector<Row> rows;

  std::size_t add_variable(const T& cost = T(0)) {
    objective.resize(variables + 1, T(0));
    objective[variables] = cost;
    return variables++;
  }
};

template <Scalar T>
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  T value = 0;
  std::vector<T> x;
};

namespace detail {

template <Scalar T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * (cols + 1), T(0)) {}

  T& at(std::size_t i, std::size_t j) { return a_[i * (cols_ + 1) + j]; }
  const T& at(std::size_t i, std::size_t j) const { return a_[i * (cols_ + 1) + j]; }
  T& rhs(std::size_t i) { return at(i, cols_); }
  const T& rhs(std::size_t i) const { return at(i, cols_); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c, std::vector<T>& reduced, T& value) {
    const T inv = T(1) / at(r, c);
    nonzero_.clear();
    for (std::size_t j = 0; j <= cols_; ++j) {
      if (at(r, j) != 0) {
        at(r, j) *= inv;
        nonzero_.push_back(j);
      }
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const T factor = at(i, c);
      if (factor == 0) continue;
      for (std::size_t j : nonzero_) at(i, j) -= factor * at(r, j);
      if constexpr (!scalar_traits<T>::exact) at(i, c) = 0;
    }
    const T factor = reduced[c];
    if (factor != 0) {
      for (std::size_t j : nonzero_) {
        if (j == cols_) {
          value -= factor * at(r, j);
        } else {
          reduced[j] -= factor * at(r, j);
        }
      }
    }
  }

  void erase_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)),
             a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (cols_ + 1)));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> a_;
  std::vector<std::size_t> nonzero_;
};

template <Scalar T>
T pivot_eps() {
  if constexpr (scalar_traits<T>::exact) {
    return T(0);
  } else {
    return 1e-12;
  }
}

// Runs Bland-rule pivots until optimal or unbounded. `value` tracks
// -(current objective) in the usual tableau convention: objective = -value.
template <Scalar T>
LpStatus optimize(Tableau<T>& tab, std::vector<std::size_t>& basis, std::vector<T>& reduced, T& value,
                  const std::vector<bool>& allowed) {
  const T eps = pivot_eps<T>();
  while (true) {
    std::size_t entering = tab.cols();
    for (std::size_t j = 0; j < tab.cols(); ++j) {
      if (allowed[j] && reduced[j] < -eps) {
        entering = j;
        break;
      }
    }
    if (entering == tab.cols()) return LpStatus::optimal;

    std::size_t leaving = tab.rows();
    T best_ratio = 0;
    for (std::size_t i = 0; i < tab.rows(); ++i) {
      if (!(tab.at(i, entering) > eps)) continue;
      T ratio = tab.rhs(i) / tab.at(i, entering);
      if (leaving == tab.rows() || ratio < best_ratio ||
          (ratio == best_ratio && basis[i] < basis[leaving])) {
        leaving = i;
        best_ratio = ratio;
      }
    }
    if (leaving == tab.rows()) return LpStatus::unbounded;
    tab.pivot(leaving, entering, reduced, value);
    basis[leaving] = entering;
  }
}

}  // namespace detail

template <Scalar T>
LpSolution<T> solve_lp(const LinearProgram<T>& lp) {
  const std::size_t n = lp.variables;
  const std::size_t m = lp.rows.size();

  // Column layout: structural | slacks (one per <= row) | artificials.
  std::size_t slack_count = 0;
  for (const auto& row : lp.rows)
    if (row.sense == RowSense::less_equal) ++slack_count;

  std::vector<std::size_t> slack_of(m, std::numeric_limits<std::size_t>::max());
  std::vector<bool> needs_artificial(m, true);
  {
    std::size_t s = n;
    for (std::size_t i = 0; i < m; ++i) {
      if (lp.rows[i].sense == RowSense::less_equal) {
        slack_of[i] = s++;
        if (lp.rows[i].rhs >= 0) needs_artificial[i] = false;
      }
    }
  }
  std::size_t artificial_count = 0;
  for (bool need : needs_artificial)
    if (need) ++artificial_count;

  const std::size_t first_artificial = n + slack_count;
  const std::size_t cols = first_artificial + artificial_count;
  detail::Tableau<T> tab(m, cols);
  std::vector<std::size_t> basis(m);

  std::size_t next_artificial = first_artificial;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    const bool negate = row.rhs < 0;
    for (const auto& [var, coef] : row.terms) tab.at(i, var) += negate ? T(-coef) : coef;
    if (slack_of[i] != std::numeric_limits<std::size_t>::max()) tab.at(i, slack_of[i]) = negate ? T(-1) : T(1);
    tab.rhs(i) = negate ? T(-row.rhs) : row.rhs;
    if (needs_artificial[i]) {
      tab.at(i, next_artificial) = T(1);
      basis[i] = next_artificial++;
    } else {
      basis[i] = slack_of[i];
    }
  }

  // Phase 1: minimize the sum of artificials.
  std::vector<T> reduced(cols, T(0));
  T value = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < first_artificial) continue;
    for (std::size_t j = 0; j < first_artificial; ++j) reduced[j] -= tab.at(i, j);
    value -= tab.rhs(i);
  }
  std::vector<bool> allowed(cols, true);
  if (artificial_count > 0) {
    detail::optimize(tab, basis, reduced, value, allowed);
    if (-value > detail::pivot_eps<T>() * T(static_cast<long>(m + 1))) return {LpStatus::infeasible, T(0), {}};
    // Drive remaining (zero-level) artificials out of the basis.
    for (std::size_t i = 0; i < tab.rows();) {
      if (basis[i] < first_artificial) {
        ++i;
        continue;
      }
      std::size_t col = first_artificial;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (abs_value(tab.at(i, j)) > detail::pivot_eps<T>()) {
          col = j;
          break;
        }
      }
      if (col == first_artificial) {
        tab.erase_row(i);
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      T ignored = 0;
      std::vector<T> scratch(cols, T(0));
      tab.pivot(i, col, scratch, ignored);
      basis[i] = col;
      ++i;
    }
    for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = false;
  }

  // Phase 2.
  std::fill(reduced.begin(), reduced.end(), T(0));
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) reduced[j] = lp.objective[j];
  value = 0;
  for (std::size_t i = 0; i < tab.rows(); ++i) {
    const std::size_t b = basis[i];
    if (b >= n || b >= lp.objective.size() || lp.objective[b] == 0) continue;
    const T cost = lp.objective[b];
    for (std::size_t j = 0; j < cols; ++j)
      if (tab.at(i, j) != 0) reduced[j] -= cost * tab.at(i, j);
    value -= cost * tab.rhs(i);
  }
  if (detail::optimize(tab, basis, reduced, value, allowed) == LpStatus::unbounded)
    return {LpStatus::unbounded, T(0), {}};

  LpSolution<T> out;
  out.status = LpStatus::optimal;
  out.x.assign(n, T(0));
  for (std::size_t i = 0; i < tab.rows(); ++i)
    if (basis[i] < n) out.x[basis[i]] = tab.rhs(i);
  out.value = 0;
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) out.value += lp.objective[j] * out.x[j];
  return out;
}

}  // namespace gds
