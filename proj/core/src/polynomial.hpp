#pragma once

#include <optional>
#include <string>
#include <vector>

#include "declsolve/expr.hpp"

namespace declsolve::detail {

/// Dense univariate polynomial, coefficients from the constant term up.
struct Poly {
  std::vector<Rational> coeffs;

  static Poly constant(Rational c) { return Poly{{std::move(c)}}; }
  static Poly identity() { return Poly{{Rational(0), Rational(1)}}; }

  void trim();
  bool is_zero() const { return coeffs.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  const Rational& coeff(std::size_t i) const;

  Rational eval(const Rational& x) const;
  long double eval(long double x) const;
  long double derivative_at(long double x) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Rational& k) const;
};

/// num / den with den not identically zero.
struct RationalFunction {
  Poly num;
  Poly den;
};

inline constexpr int kMaxPolyDegree = 64;

/// Rewrites `expr` as a ratio of polynomials in `var`. Returns nullopt when
/// the expression mentions other variables, raises `var` to a non-integer or
/// variable power, or exceeds kMaxPolyDegree. Throws DivisionByZero for a
/// constant zero divisor.
std::optional<RationalFunction> to_rational_function(const Expr& expr, const std::string& var);

}  // namespace declsolve::detail
