#include "declsolve/rational.hpp"

#include <cassert>
#include <cctype>
#include <cmath>
#include <ostream>

#include "declsolve/errors.hpp"

namespace declsolve {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational::Rational(mpq_class value) : value_(std::move(value)) {
  value_.canonicalize();
  assert(is_canonical());
}

Rational::Rational(const BigInt& numerator, const BigInt& denominator) {
  if (denominator == 0) throw Error(ErrorCode::DivisionByZero, "zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
  assert(is_canonical());
}

std::optional<Rational> Rational::try_parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    BigInt d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    result = Rational(BigInt(std::string(num), 10), d);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    if (!all_digits(frac) || !(whole.empty() || all_digits(whole))) return std::nullopt;
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    BigInt num(std::string(whole) + std::string(frac), 10);
    result = Rational(num, scale);
  } else {
    if (!all_digits(text)) return std::nullopt;
    result = Rational(BigInt(std::string(text), 10));
  }
  return negative ? -result : result;
}

Rational Rational::parse(std::string_view text) {
  if (auto r = try_parse(text)) return *r;
  throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(text) + "'");
}

std::optional<Rational> Rational::from_double(double value) {
  if (!std::isfinite(value)) return std::nullopt;
  return Rational(mpq_class(value));
}

bool Rational::is_canonical() const {
  if (value_.get_den() <= 0) return false;
  BigInt g;
  BigInt n = ::abs(value_.get_num());
  mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), value_.get_den().get_mpz_t());
  return g == 1 || (n == 0 && value_.get_den() == 1);
}

Rational Rational::abs() const { return Rational(mpq_class(::abs(value_))); }

Rational Rational::reciprocal() const {
  if (is_zero()) throw Error(ErrorCode::DivisionByZero, "reciprocal of zero");
  return Rational(mpq_class(1) / value_);
}

Rational Rational::pow(long exponent) const {
  const unsigned long magnitude =
      exponent < 0 ? static_cast<unsigned long>(-(exponent + 1)) + 1 : static_cast<unsigned long>(exponent);
  BigInt num;
  BigInt den;
  mpz_pow_ui(num.get_mpz_t(), value_.get_num().get_mpz_t(), magnitude);
  mpz_pow_ui(den.get_mpz_t(), value_.get_den().get_mpz_t(), magnitude);
  Rational r(num, den);
  return exponent < 0 ? r.reciprocal() : r;
}

std::string Rational::to_string() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::optional<Rational> Rational::exact_sqrt() const {
  if (sign() < 0) return std::nullopt;
  const BigInt& num = value_.get_num();
  const BigInt& den = value_.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) {
    return std::nullopt;
  }
  BigInt rn;
  BigInt rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return Rational(rn, rd);
}

Rational& Rational::operator+=(const Rational& other) {
  value_ += other.value_;
  assert(is_canonical());
  return *this;
}

Rational& Rational::operator-=(const Rational& other) {
  value_ -= other.value_;
  assert(is_canonical());
  return *this;
}

Rational& Rational::operator*=(const Rational& other) {
  value_ *= other.value_;
  assert(is_canonical());
  return *this;
}

Rational& Rational::operator/=(const Rational& other) {
  if (other.is_zero()) throw Error(ErrorCode::DivisionByZero, "division by zero");
  value_ /= other.value_;
  assert(is_canonical());
  return *this;
}

Rational Rational::operator-() const { return Rational(mpq_class(-value_)); }

std::ostream& operator<<(std::ostream& os, const Rational& value) { return os << value.to_string(); }

}  // namespace declsolve
