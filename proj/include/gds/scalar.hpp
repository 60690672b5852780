#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

namespace gds {

/// Exact scalar used wherever an attained minimum has to be certified.
using Rational = mpq_class;

enum class NumericMode { exact, floating };

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr NumericMode mode = NumericMode::exact;
  static Rational tolerance() { return Rational(0); }
  /// Allowed deviation of a probability vector's total from 1.
  static Rational mass_tolerance() { return Rational(0); }
  static double to_double(const Rational& v) { return v.get_d(); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr NumericMode mode = NumericMode::floating;
  static double tolerance() { return 1e-9; }
  static double mass_tolerance() { return 1e-12; }
  static double to_double(double v) { return v; }
};

template <class T>
concept Scalar = requires { scalar_traits<T>::exact; };

template <Scalar T>
T abs_value(const T& v) {
  if (v < 0) return T(-v);
  return v;
}

template <Scalar T>
T abs_diff(const T& a, const T& b) {
  return a < b ? T(b - a) : T(a - b);
}

template <Scalar T>
const T& max_of(const T& a, const T& b) {
  return a < b ? b : a;
}

template <Scalar T>
const T& min_of(const T& a, const T& b) {
  return b < a ? b : a;
}

/// a <= b up to the mode tolerance (exact comparison for rationals).
template <Scalar T>
bool approx_le(const T& a, const T& b) {
  return a <= b + scalar_traits<T>::tolerance();
}

template <Scalar T>
bool approx_eq(const T& a, const T& b) {
  return abs_diff(a, b) <= scalar_traits<T>::tolerance();
}

template <Scalar T>
double to_double(const T& v) {
  return scalar_traits<T>::to_double(v);
}

/// Converts a double to T. For rationals the conversion is exact in binary,
/// so callers that want decimal semantics should go through parse_scalar.
template <Scalar T>
T from_double(double v) {
  return T(v);
}

template <Scalar T>
T from_ratio(std::int64_t num, std::int64_t den) {
  if constexpr (scalar_traits<T>::exact) {
    Rational r(static_cast<long>(num), static_cast<unsigned long>(den));
    r.canonicalize();
    return r;
  } else {
    return static_cast<double>(num) / static_cast<double>(den);
  }
}

/// Parses "p/q", an integer, or a decimal literal (with optional exponent).
/// Rationals are parsed exactly, so "0.1" becomes 1/10.
bool parse_rational(std::string_view text, Rational& out);

template <Scalar T>
bool parse_scalar(std::string_view text, T& out) {
  Rational r;
  if (!parse_rational(text, r)) return false;
  if constexpr (scalar_traits<T>::exact) {
    out = r;
  } else if (text.find('/') != std::string_view::npos) {
    out = r.get_num().get_d() / r.get_den().get_d();
  } else {
    // round to nearest, as the literal reads
    out = std::strtod(std::string(text).c_str(), nullptr);
  }
  return true;
}

/// Decimal rendering with 12 significant digits.
inline std::string format_decimal(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

template <Scalar T>
std::string format_decimal(const T& v) {
  return format_decimal(to_double(v));
}

/// "p/q" for rationals (or "p" when q = 1); shortest round-trip decimal for
/// doubles.
std::string format_exact(const Rational& v);
std::string format_exact(double v);

}  // namespace gds
