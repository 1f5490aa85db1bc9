#include "declsolve/errors.hpp"
#include "declsolve/expr.hpp"
#include "overloaded.hpp"

namespace declsolve {

using detail::Overloaded;

namespace {

LinearForm scaled(LinearForm form, const Rational& factor) {
  if (factor.is_zero()) return LinearForm{};
  for (auto& [name, coeff] : form.coefficients) coeff *= factor;
  form.constant *= factor;
  return form;
}

LinearForm combined(LinearForm lhs, const LinearForm& rhs, int sign) {
  for (const auto& [name, coeff] : rhs.coefficients) {
    Rational& slot = lhs.coefficients[name];
    slot += sign > 0 ? coeff : -coeff;
    if (slot.is_zero()) lhs.coefficients.erase(name);
  }
  lhs.constant += sign > 0 ? rhs.constant : -rhs.constant;
  return lhs;
}

[[noreturn]] void nonlinear(const Expr& expr) {
  throw Error(ErrorCode::NonLinear, "'" + render(expr) + "' is not linear");
}

}  // namespace

LinearForm linear_form(const Expr& expr) {
  return std::visit(
      Overloaded{
          [](const Num& n) { return LinearForm{{}, n.value}; },
          [](const Var& v) {
            LinearForm f;
            f.coefficients.emplace(v.name, Rational(1));
            return f;
          },
          [](const Neg& n) { return scaled(linear_form(n.operand), Rational(-1)); },
          [&](const Binary& b) {
            switch (b.op) {
              case BinaryOp::Add: return combined(linear_form(b.lhs), linear_form(b.rhs), +1);
              case BinaryOp::Sub: return combined(linear_form(b.lhs), linear_form(b.rhs), -1);
              case BinaryOp::Mul: {
                LinearForm l = linear_form(b.lhs);
                LinearForm r = linear_form(b.rhs);
                if (l.is_constant()) return scaled(std::move(r), l.constant);
                if (r.is_constant()) return scaled(std::move(l), r.constant);
                nonlinear(expr);
              }
              case BinaryOp::Div: {
                LinearForm r = linear_form(b.rhs);
                if (!r.is_constant()) nonlinear(expr);
                if (r.constant.is_zero()) throw Error(ErrorCode::DivisionByZero, "division by zero in '" + render(expr) + "'");
                return scaled(linear_form(b.lhs), r.constant.reciprocal());
              }
              case BinaryOp::Pow: {
                LinearForm exponent = linear_form(b.rhs);
                if (!exponent.is_constant()) nonlinear(expr);
                LinearForm base = linear_form(b.lhs);
                if (base.is_constant()) {
                  return LinearForm{{}, eval_exact(Expr::binary(BinaryOp::Pow, Expr::num(base.constant),
                                                                Expr::num(exponent.constant)))};
                }
                if (exponent.constant == Rational(0)) return LinearForm{{}, Rational(1)};
                if (exponent.constant == Rational(1)) return base;
                nonlinear(expr);
              }
            }
            nonlinear(expr);
          },
      },
      expr.node());
}

}  // namespace declsolve
