#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gds/errors.hpp"
#include "gds/matrix.hpp"
#include "gds/model.hpp"
#include "gds/scalar.hpp"

namespace gds {

/// Subset of the grid {0..rows-1} x {0..cols-1}, cell (x, y) at bit x * cols + y.
/// Every subset of a finite product is closed, so this stands in for the
/// closed sets S of the box distance. At most 64 cells.
class CellSet {
 public:
  static constexpr std::size_t max_cells = 64;

  CellSet() = default;
  CellSet(std::size_t rows, std::size_t cols, std::uint64_t bits = 0) : rows_(rows), cols_(cols), bits_(bits) {
    if (rows * cols > max_cells) throw SizeLimit("cell sets are limited to 64 cells");
    if (rows * cols < max_cells) bits_ &= (std::uint64_t{1} << (rows * cols)) - 1;
  }

  static CellSet full(std::size_t rows, std::size_t cols) {
    return CellSet(rows, cols, rows * cols == max_cells ? ~std::uint64_t{0} : (std::uint64_t{1} << (rows * cols)) - 1);
  }

  static CellSet diagonal(std::size_t n) {
    CellSet s(n, n);
    for (std::size_t i = 0; i < n; ++i) s.insert(i, i);
    return s;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t cell_count() const { return rows_ * cols_; }
  std::uint64_t bits() const { return bits_; }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  bool empty() const { return bits_ == 0; }

  bool contains(std::size_t cell) const { return (bits_ >> cell) & 1U; }
  bool contains(std::size_t x, std::size_t y) const { return contains(x * cols_ + y); }
  void insert(std::size_t x, std::size_t y) { bits_ |= std::uint64_t{1} << (x * cols_ + y); }
  void insert(std::size_t cell) { bits_ |= std::uint64_t{1} << cell; }
  void erase(std::size_t cell) { bits_ &= ~(std::uint64_t{1} << cell); }

  std::vector<std::size_t> cells() const {
    std::vector<std::size_t> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
  }

  CellSet complement() const { return CellSet(rows_, cols_, ~bits_); }

  /// Same set with the roles of the two factors swapped.
  CellSet transposed() const {
    CellSet t(cols_, rows_);
    for (std::size_t c : cells()) t.insert(c % cols_, c / cols_);
    return t;
  }

  friend bool operator==(const CellSet&, const CellSet&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint64_t bits_ = 0;
};

/// Nonnegative n x m matrix whose row and column sums are the two marginals.
template <Scalar T>
class Coupling {
 public:
  Coupling() = default;

  /// Validates nonnegativity and both marginals (exactly for rationals).
  Coupling(Matrix<T> mass, const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu) : mass_(std::move(mass)) {
    if (mass_.rows() != mu.size() || mass_.cols() != nu.size())
      throw ShapeMismatch("coupling shape does not match marginals");
    const T tol = scalar_traits<T>::tolerance();
    for (std::size_t x = 0; x < rows(); ++x) {
      T sum = 0;
      for (std::size_t y = 0; y < cols(); ++y) {
        if (mass_(x, y) < -tol) throw MarginalMismatch("coupling has a negative cell");
        sum += mass_(x, y);
      }
      if (abs_diff(sum, mu[x]) > tol) throw MarginalMismatch("coupling row sums differ from the first marginal");
    }
    for (std::size_t y = 0; y < cols(); ++y) {
      T sum = 0;
      for (std::size_t x = 0; x < rows(); ++x) sum += mass_(x, y);
      if (abs_diff(sum, nu[y]) > tol) throw MarginalMismatch("coupling column sums differ from the second marginal");
    }
  }

  std::size_t rows() const { return mass_.rows(); }
  std::size_t cols() const { return mass_.cols(); }
  const T& operator()(std::size_t x, std::size_t y) const { return mass_(x, y); }
  const Matrix<T>& matrix() const { return mass_; }
  /// Cell masses in CellSet order (x * cols + y).
  std::span<const T> flat() const { return mass_.flat(); }

  T mass_on(const CellSet& S) const {
    T total = 0;
    for (std::size_t c : S.cells()) total += mass_.flat()[c];
    return total;
  }

  std::vector<T> first_marginal() const {
    std::vector<T> out(rows(), T(0));
    for (std::size_t x = 0; x < rows(); ++x)
      for (std::size_t y = 0; y < cols(); ++y) out[x] += mass_(x, y);
    return out;
  }

  std::vector<T> second_marginal() const {
    std::vector<T> out(cols(), T(0));
    for (std::size_t x = 0; x < rows(); ++x)
      for (std::size_t y = 0; y < cols(); ++y) out[y] += mass_(x, y);
    return out;
  }

  Coupling transposed() const {
    Coupling t;
    t.mass_ = mass_.transposed();
    return t;
  }

  friend bool operator==(const Coupling& a, const Coupling& b) { return a.mass_ == b.mass_; }

 private:
  Matrix<T> mass_;
};

}  // namespace gds
