#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace declsolve {

using BigInt = mpz_class;

/// Exact rational number over arbitrary-precision integers.
///
/// Always stored in canonical form: the denominator is positive and
/// gcd(|numerator|, denominator) == 1, so zero is 0/1 and structural
/// equality coincides with numeric equality.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : value_(value) {}   // NOLINT(google-explicit-constructor)
  explicit Rational(const BigInt& integer) : value_(integer) {}

  /// Throws DivisionByZero when `denominator` is zero.
  Rational(const BigInt& numerator, const BigInt& denominator);

  /// Parses `-?digits`, `-?digits.digits` or `-?digits/digits`. Decimal
  /// fractions are converted exactly (0.25 -> 1/4). Throws InvalidArgument.
  static Rational parse(std::string_view text);
  static std::optional<Rational> try_parse(std::string_view text);

  /// Exact value of a finite double; nullopt for NaN and infinities.
  static std::optional<Rational> from_double(double value);

  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }

  bool is_integer() const { return value_.get_den() == 1; }
  bool is_zero() const { return sgn(value_) == 0; }
  int sign() const { return sgn(value_); }
  bool is_canonical() const;

  Rational abs() const;
  Rational reciprocal() const;  // throws DivisionByZero on zero
  /// Integer power; negative exponents take the reciprocal.
  Rational pow(long exponent) const;

  double to_double() const { return value_.get_d(); }

  /// Minimal decimal for integers, `p/q` otherwise.
  std::string to_string() const;

  /// Square root when it is itself rational.
  std::optional<Rational> exact_sqrt() const;

  Rational& operator+=(const Rational& other);
  Rational& operator-=(const Rational& other);
  Rational& operator*=(const Rational& other);
  Rational& operator/=(const Rational& other);  // throws DivisionByZero

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
  Rational operator-() const;

  friend bool operator==(const Rational& lhs, const Rational& rhs) { return lhs.value_ == rhs.value_; }
  friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
    const int c = cmp(lhs.value_, rhs.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  explicit Rational(mpq_class value);

  mpq_class value_;
};

std::ostream& operator<<(std::ostream& os, const Rational& value);

}  // namespace declsolve
