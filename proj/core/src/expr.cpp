#include "declsolve/expr.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>

#include "declsolve/errors.hpp"
#include "overloaded.hpp"

namespace declsolve {

using detail::Overloaded;

namespace {

// Bound on the size of an exact power so a hostile transcript cannot ask for
// 10^(10^9).
constexpr long kMaxExponent = 100000;
constexpr std::size_t kMaxPowerBits = 1u << 22;

const std::string kEmpty;

Rational power(const Rational& base, const Rational& exponent) {
  if (!exponent.is_integer()) {
    throw Error(ErrorCode::NonIntegerExponent, "exponent " + exponent.to_string() + " is not an integer");
  }
  const BigInt e = exponent.numerator();
  if (!e.fits_slong_p() || ::abs(e) > kMaxExponent) {
    throw Error(ErrorCode::ExponentTooLarge, "exponent " + e.get_str() + " out of range");
  }
  const long n = e.get_si();
  const std::size_t bits = mpz_sizeinbase(base.numerator().get_mpz_t(), 2) +
                           mpz_sizeinbase(base.denominator().get_mpz_t(), 2);
  if (bits * static_cast<std::size_t>(std::labs(n)) > kMaxPowerBits) {
    throw Error(ErrorCode::ExponentTooLarge, "power result too large");
  }
  if (base.is_zero() && n < 0) throw Error(ErrorCode::DivisionByZero, "zero raised to a negative power");
  return base.pow(n);
}

void collect_vars(const Expr& e, std::set<std::string, std::less<>>& out) {
  std::visit(Overloaded{
                 [](const Num&) {},
                 [&](const Var& v) { out.insert(v.name); },
                 [&](const Neg& n) { collect_vars(n.operand, out); },
                 [&](const Binary& b) {
                   collect_vars(b.lhs, out);
                   collect_vars(b.rhs, out);
                 },
             },
             e.node());
}

void render_to(const Expr& e, std::string& out) {
  std::visit(Overloaded{
                 [&](const Num& n) {
                   if (n.value.sign() < 0) {
                     out += "(-";
                     out += n.value.abs().to_string();
                     out += ')';
                   } else if (n.value.is_integer()) {
                     out += n.value.to_string();
                   } else {
                     out += '(';
                     out += n.value.to_string();
                     out += ')';
                   }
                 },
                 [&](const Var& v) { out += v.name; },
                 [&](const Neg& n) {
                   out += "(-";
                   render_to(n.operand, out);
                   out += ')';
                 },
                 [&](const Binary& b) {
                   out += '(';
                   render_to(b.lhs, out);
                   out += ' ';
                   out += to_char(b.op);
                   out += ' ';
                   render_to(b.rhs, out);
                   out += ')';
                 },
             },
             e.node());
}

}  // namespace

char to_char(BinaryOp op) noexcept {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

bool is_identifier(std::string_view name) noexcept {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  for (char c : name.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_')) return false;
  }
  return true;
}

Expr Expr::num(Rational value) { return Expr(std::make_shared<const Node>(Num{std::move(value)})); }

Expr Expr::var(std::string name) {
  if (!is_identifier(name)) throw Error(ErrorCode::InvalidArgument, "invalid identifier '" + name + "'");
  return Expr(std::make_shared<const Node>(Var{std::move(name)}));
}

Expr Expr::neg(Expr operand) { return Expr(std::make_shared<const Node>(Neg{std::move(operand)})); }

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Binary{op, std::move(lhs), std::move(rhs)}));
}

bool Expr::is_num() const { return std::holds_alternative<Num>(*node_); }
bool Expr::is_var() const { return std::holds_alternative<Var>(*node_); }

const std::string& Expr::var_name() const {
  if (const auto* v = std::get_if<Var>(node_.get())) return v->name;
  return kEmpty;
}

bool operator==(const Expr& lhs, const Expr& rhs) {
  if (lhs.node_ == rhs.node_) return true;
  const Node& a = *lhs.node_;
  const Node& b = *rhs.node_;
  if (a.index() != b.index()) return false;
  return std::visit(Overloaded{
                        [&](const Num& x) { return x.value == std::get<Num>(b).value; },
                        [&](const Var& x) { return x.name == std::get<Var>(b).name; },
                        [&](const Neg& x) { return x.operand == std::get<Neg>(b).operand; },
                        [&](const Binary& x) {
                          const auto& y = std::get<Binary>(b);
                          return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
                        },
                    },
                    a);
}

Expr operator+(Expr lhs, Expr rhs) { return Expr::binary(BinaryOp::Add, std::move(lhs), std::move(rhs)); }
Expr operator-(Expr lhs, Expr rhs) { return Expr::binary(BinaryOp::Sub, std::move(lhs), std::move(rhs)); }
Expr operator*(Expr lhs, Expr rhs) { return Expr::binary(BinaryOp::Mul, std::move(lhs), std::move(rhs)); }
Expr operator/(Expr lhs, Expr rhs) { return Expr::binary(BinaryOp::Div, std::move(lhs), std::move(rhs)); }
Expr operator-(Expr operand) { return Expr::neg(std::move(operand)); }
Expr pow(Expr base, Expr exponent) { return Expr::binary(BinaryOp::Pow, std::move(base), std::move(exponent)); }

Rational eval_exact(const Expr& expr, const Bindings& bindings) {
  return std::visit(Overloaded{
                        [](const Num& n) { return n.value; },
                        [&](const Var& v) {
                          auto it = bindings.find(v.name);
                          if (it == bindings.end()) {
                            throw Error(ErrorCode::UnboundVariable, "variable '" + v.name + "' is unbound");
                          }
                          return it->second;
                        },
                        [&](const Neg& n) { return -eval_exact(n.operand, bindings); },
                        [&](const Binary& b) {
                          Rational l = eval_exact(b.lhs, bindings);
                          Rational r = eval_exact(b.rhs, bindings);
                          switch (b.op) {
                            case BinaryOp::Add: return l + r;
                            case BinaryOp::Sub: return l - r;
                            case BinaryOp::Mul: return l * r;
                            case BinaryOp::Div: return l / r;
                            case BinaryOp::Pow: return power(l, r);
                          }
                          return Rational{};
                        },
                    },
                    expr.node());
}

double eval_approx(const Expr& expr, const std::map<std::string, double, std::less<>>& bindings) {
  return std::visit(Overloaded{
                        [](const Num& n) { return n.value.to_double(); },
                        [&](const Var& v) {
                          auto it = bindings.find(v.name);
                          if (it == bindings.end()) {
                            throw Error(ErrorCode::UnboundVariable, "variable '" + v.name + "' is unbound");
                          }
                          return it->second;
                        },
                        [&](const Neg& n) { return -eval_approx(n.operand, bindings); },
                        [&](const Binary& b) {
                          const double l = eval_approx(b.lhs, bindings);
                          const double r = eval_approx(b.rhs, bindings);
                          switch (b.op) {
                            case BinaryOp::Add: return l + r;
                            case BinaryOp::Sub: return l - r;
                            case BinaryOp::Mul: return l * r;
                            case BinaryOp::Div:
                              return r == 0.0 ? std::numeric_limits<double>::quiet_NaN() : l / r;
                            case BinaryOp::Pow: return std::pow(l, r);
                          }
                          return 0.0;
                        },
                    },
                    expr.node());
}

Expr substitute(const Expr& expr, std::string_view var, const Expr& replacement) {
  return std::visit(Overloaded{
                        [&](const Num&) { return expr; },
                        [&](const Var& v) { return v.name == var ? replacement : expr; },
                        [&](const Neg& n) { return Expr::neg(substitute(n.operand, var, replacement)); },
                        [&](const Binary& b) {
                          return Expr::binary(b.op, substitute(b.lhs, var, replacement),
                                              substitute(b.rhs, var, replacement));
                        },
                    },
                    expr.node());
}

std::set<std::string, std::less<>> free_vars(const Expr& expr) {
  std::set<std::string, std::less<>> out;
  collect_vars(expr, out);
  return out;
}

void collect_numerals(const Expr& expr, std::vector<Rational>& out) {
  std::visit(Overloaded{
                 [&](const Num& n) { out.push_back(n.value); },
                 [](const Var&) {},
                 [&](const Neg& n) { collect_numerals(n.operand, out); },
                 [&](const Binary& b) {
                   collect_numerals(b.lhs, out);
                   collect_numerals(b.rhs, out);
                 },
             },
             expr.node());
}

std::size_t depth(const Expr& expr) {
  return std::visit(Overloaded{
                        [](const Num&) -> std::size_t { return 1; },
                        [](const Var&) -> std::size_t { return 1; },
                        [](const Neg& n) -> std::size_t { return 1 + depth(n.operand); },
                        [](const Binary& b) -> std::size_t { return 1 + std::max(depth(b.lhs), depth(b.rhs)); },
                    },
                    expr.node());
}

std::string render(const Expr& expr) {
  std::string out;
  render_to(expr, out);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& expr) { return os << render(expr); }

}  // namespace declsolve
