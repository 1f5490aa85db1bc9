#pragma once

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "declsolve/expr.hpp"
#include "declsolve/formal.hpp"

namespace declsolve {

/// A solver result: exact rational, or a real approximation when no exact
/// closed form was found.
class Value {
 public:
  Value(Rational exact) : repr_(std::move(exact)) {}  // NOLINT(google-explicit-constructor)
  static Value approximate(double value) { return Value(value); }

  bool is_exact() const { return std::holds_alternative<Rational>(repr_); }
  const Rational& exact() const { return std::get<Rational>(repr_); }
  double to_double() const;

  bool is_nonnegative() const;
  bool is_integer_valued() const;

  /// Exact values print as rationals; approximations with 10 significant
  /// decimals and a leading `~`.
  std::string to_string() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  explicit Value(double approx) : repr_(approx) {}
  std::variant<Rational, double> repr_;
};

struct Equation {
  Expr lhs;
  Expr rhs;
};

struct EquationSystem {
  std::vector<Equation> equations;
  std::set<std::string, std::less<>> unknowns;
  std::string goal;
};

/// Equations, unknowns and goal of a validated script.
EquationSystem system_from_script(const SolutionScript& script);

enum class Method { Substitution, LinearElimination, Quadratic, Numeric };

std::string_view to_string(Method method) noexcept;

struct TraceStep {
  Method method;
  std::string detail;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct SolveOutcome {
  std::vector<Value> candidates;  // goal values, deduplicated, in discovery order
  Value selected{Rational{}};
  std::vector<TraceStep> trace;

  friend bool operator==(const SolveOutcome&, const SolveOutcome&) = default;
};

/// One step per line, `<method>: <detail>`.
std::string render_trace(const std::vector<TraceStep>& trace);

struct ForwardResult {
  Bindings bindings;
  EquationSystem residual;
};

/// Binds every variable defined by an equation `v = e` (either orientation)
/// whose other side evaluates under the bindings so far, substituting until
/// nothing changes. Ground equations left over are checked and dropped.
/// Throws InconsistentBinding and DivisionByZero.
ForwardResult forward_substitute(const EquationSystem& system);

struct LinearSolution {
  Bindings values;         // every variable the equations pin down
  bool complete = true;    // false when some unknown stayed free
};

/// Exact Gaussian elimination. The goal must be pinned: an underdetermined
/// system still succeeds when the goal's value is forced, with `complete`
/// cleared. Throws NonLinear, Inconsistent and Underdetermined.
LinearSolution solve_linear(const EquationSystem& system);

struct UnivariateSolution {
  std::vector<Value> roots;
  Method method;
};

/// Real roots of lhs = rhs in the single unknown `var`. Linear and
/// quadratic polynomials (after clearing denominators) are solved in closed
/// form; anything else goes to a bracketing Newton search. Throws
/// NoRealRoot, NumericDivergence and Underdetermined (identity equations).
UnivariateSolution solve_univariate_traced(const Equation& equation, const std::string& var);
std::vector<Value> solve_univariate(const Equation& equation, const std::string& var);

inline constexpr std::size_t kMaxBranches = 16;

/// Full pipeline: forward substitution, then linear elimination, then
/// branching over the roots of univariate equations (isolating linear
/// variables when no equation is univariate yet). Throws Unsolvable or the
/// underlying solver error.
SolveOutcome solve_system(const EquationSystem& system);

/// Deterministic choice among candidates: a lone candidate wins; otherwise
/// prefer exact, then nonnegative, then integer-valued, then smallest
/// magnitude, then the smaller value. Independent of input order.
Value select_answer(std::span<const Value> candidates);

std::ostream& operator<<(std::ostream& os, const Value& value);

using SolveFn = std::function<SolveOutcome(const EquationSystem&)>;

}  // namespace declsolve
