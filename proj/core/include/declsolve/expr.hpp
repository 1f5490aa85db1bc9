#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "declsolve/rational.hpp"

namespace declsolve {

class Expr;

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

char to_char(BinaryOp op) noexcept;

struct Num {
  Rational value;
};

struct Var {
  std::string name;
};

struct Neg;
struct Binary;

using Node = std::variant<Num, Var, Neg, Binary>;

/// Immutable arithmetic expression tree over rationals and named variables.
///
/// Nodes are shared, so copies are cheap and trees may be handed across
/// threads freely. Construction never simplifies: `x + 0` stays `x + 0`.
class Expr {
 public:
  static Expr num(Rational value);
  /// Throws InvalidArgument when `name` is not `[A-Za-z_][A-Za-z0-9_]*`.
  static Expr var(std::string name);
  static Expr neg(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  const Node& node() const;

  bool is_num() const;
  bool is_var() const;
  /// Name of a Var node, empty otherwise.
  const std::string& var_name() const;

  /// Structural equality.
  friend bool operator==(const Expr& lhs, const Expr& rhs);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Neg {
  Expr operand;
};

struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};

inline const Node& Expr::node() const { return *node_; }

Expr operator+(Expr lhs, Expr rhs);
Expr operator-(Expr lhs, Expr rhs);
Expr operator*(Expr lhs, Expr rhs);
Expr operator/(Expr lhs, Expr rhs);
Expr operator-(Expr operand);
Expr pow(Expr base, Expr exponent);

bool is_identifier(std::string_view name) noexcept;

using Bindings = std::map<std::string, Rational, std::less<>>;

/// Exact evaluation. Throws UnboundVariable, DivisionByZero,
/// NonIntegerExponent and ExponentTooLarge.
Rational eval_exact(const Expr& expr, const Bindings& bindings = {});

/// Floating-point evaluation used by the numeric root finder. Real-valued
/// powers are allowed here; division by zero yields a non-finite result.
double eval_approx(const Expr& expr, const std::map<std::string, double, std::less<>>& bindings);

Expr substitute(const Expr& expr, std::string_view var, const Expr& replacement);

std::set<std::string, std::less<>> free_vars(const Expr& expr);

/// Every numeric literal in the tree, in pre-order.
void collect_numerals(const Expr& expr, std::vector<Rational>& out);

std::size_t depth(const Expr& expr);

/// Canonical text: fully parenthesized infix with `+ - * / ^`. Integers are
/// minimal decimals; a non-integer literal p/q renders as `(p/q)` with no
/// inner whitespace so the parser reads it back as a single literal.
std::string render(const Expr& expr);

/// Sparse affine form sum(coefficients[v] * v) + constant.
struct LinearForm {
  std::map<std::string, Rational, std::less<>> coefficients;  // no zero entries
  Rational constant;

  bool is_constant() const { return coefficients.empty(); }
  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

/// Throws NonLinear when `expr` has degree > 1 after distribution, and
/// DivisionByZero on a constant zero divisor.
LinearForm linear_form(const Expr& expr);

std::ostream& operator<<(std::ostream& os, const Expr& expr);

}  // namespace declsolve
