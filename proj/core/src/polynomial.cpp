#include "polynomial.hpp"

#include <algorithm>

#include "declsolve/errors.hpp"
#include "overloaded.hpp"

namespace declsolve::detail {

namespace {

const Rational kZero;

bool same(const Poly& a, const Poly& b) { return a.coeffs == b.coeffs; }

bool too_big(const Poly& p) { return p.degree() > kMaxPolyDegree; }

std::optional<RationalFunction> checked(RationalFunction f) {
  f.num.trim();
  f.den.trim();
  if (too_big(f.num) || too_big(f.den)) return std::nullopt;
  // constant denominators fold into the numerator
  if (f.den.degree() == 0) {
    const Rational k = f.den.coeffs[0].reciprocal();
    f.num = f.num.scaled(k);
    f.den = Poly::constant(Rational(1));
  }
  return f;
}

std::optional<RationalFunction> power_of(const RationalFunction& base, long n) {
  RationalFunction result{Poly::constant(Rational(1)), Poly::constant(Rational(1))};
  const long magnitude = n < 0 ? -n : n;
  if (magnitude * std::max(base.num.degree(), base.den.degree()) > kMaxPolyDegree) return std::nullopt;
  for (long i = 0; i < magnitude; ++i) {
    result.num = result.num * base.num;
    result.den = result.den * base.den;
  }
  if (n < 0) {
    if (result.num.is_zero()) throw Error(ErrorCode::DivisionByZero, "zero raised to a negative power");
    std::swap(result.num, result.den);
  }
  return checked(std::move(result));
}

}  // namespace

void Poly::trim() {
  while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
}

const Rational& Poly::coeff(std::size_t i) const { return i < coeffs.size() ? coeffs[i] : kZero; }

Rational Poly::eval(const Rational& x) const {
  Rational acc;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

long double Poly::eval(long double x) const {
  long double acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + static_cast<long double>(it->to_double());
  return acc;
}

long double Poly::derivative_at(long double x) const {
  long double acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 1;) {
    acc = acc * x + static_cast<long double>(i) * static_cast<long double>(coeffs[i].to_double());
  }
  return acc;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r;
  r.coeffs.resize(std::max(a.coeffs.size(), b.coeffs.size()));
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = a.coeff(i) + b.coeff(i);
  r.trim();
  return r;
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly r;
  r.coeffs.resize(std::max(a.coeffs.size(), b.coeffs.size()));
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = a.coeff(i) - b.coeff(i);
  r.trim();
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly{};
  Poly r;
  r.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, Rational{});
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    if (a.coeffs[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  r.trim();
  return r;
}

Poly Poly::scaled(const Rational& k) const {
  Poly r = *this;
  for (auto& c : r.coeffs) c *= k;
  r.trim();
  return r;
}

std::optional<RationalFunction> to_rational_function(const Expr& expr, const std::string& var) {
  using Result = std::optional<RationalFunction>;
  return std::visit(
      Overloaded{
          [](const Num& n) -> Result {
            Poly p = Poly::constant(n.value);
            p.trim();
            return RationalFunction{p, Poly::constant(Rational(1))};
          },
          [&](const Var& v) -> Result {
            if (v.name != var) return std::nullopt;
            return RationalFunction{Poly::identity(), Poly::constant(Rational(1))};
          },
          [&](const Neg& n) -> Result {
            auto inner = to_rational_function(n.operand, var);
            if (!inner) return std::nullopt;
            inner->num = inner->num.scaled(Rational(-1));
            return inner;
          },
          [&](const Binary& b) -> Result {
            auto l = to_rational_function(b.lhs, var);
            if (!l) return std::nullopt;
            if (b.op == BinaryOp::Pow) {
              // the exponent has to be a constant integer
              if (!free_vars(b.rhs).empty()) return std::nullopt;
              Rational e;
              try {
                e = eval_exact(b.rhs);
              } catch (const Error&) {
                return std::nullopt;
              }
              if (!e.is_integer() || !e.numerator().fits_slong_p()) return std::nullopt;
              const long n = e.numerator().get_si();
              if (n > kMaxPolyDegree || n < -kMaxPolyDegree) return std::nullopt;
              return power_of(*l, n);
            }
            auto r = to_rational_function(b.rhs, var);
            if (!r) return std::nullopt;
            switch (b.op) {
              case BinaryOp::Add:
              case BinaryOp::Sub: {
                const bool add = b.op == BinaryOp::Add;
                if (same(l->den, r->den)) {
                  return checked({add ? l->num + r->num : l->num - r->num, l->den});
                }
                Poly left = l->num * r->den;
                Poly right = r->num * l->den;
                return checked({add ? left + right : left - right, l->den * r->den});
              }
              case BinaryOp::Mul: return checked({l->num * r->num, l->den * r->den});
              case BinaryOp::Div:
                if (r->num.is_zero()) throw Error(ErrorCode::DivisionByZero, "division by zero in '" + render(expr) + "'");
                return checked({l->num * r->den, l->den * r->num});
              case BinaryOp::Pow: break;
            }
            return std::nullopt;
          },
      },
      expr.node());
}

}  // namespace declsolve::detail
