#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "declsolve/errors.hpp"
#include "declsolve/solver.hpp"

namespace declsolve {

namespace {

constexpr std::size_t kMaxDepth = 32;
constexpr double kCandidateDedupe = 1e-7;

std::set<std::string, std::less<>> vars_of(const Equation& eq) {
  auto names = free_vars(eq.lhs);
  names.merge(free_vars(eq.rhs));
  return names;
}

std::string render_equation(const Equation& eq) { return render(eq.lhs) + " = " + render(eq.rhs); }

bool close(double a, double b) { return std::fabs(a - b) <= kCandidateDedupe * std::max(1.0, std::fabs(a)); }

// Ordering used by the last two selection rules.
int compare_values(const Value& a, const Value& b) {
  if (a.is_exact() && b.is_exact()) {
    auto c = a.exact() <=> b.exact();
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  const double x = a.to_double();
  const double y = b.to_double();
  return x < y ? -1 : (x > y ? 1 : 0);
}

int compare_magnitude(const Value& a, const Value& b) {
  if (a.is_exact() && b.is_exact()) {
    auto c = a.exact().abs() <=> b.exact().abs();
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  const double x = std::fabs(a.to_double());
  const double y = std::fabs(b.to_double());
  return x < y ? -1 : (x > y ? 1 : 0);
}

template <class Pred>
void keep_if_any(std::vector<Value>& values, Pred pred) {
  if (std::any_of(values.begin(), values.end(), pred)) {
    values.erase(std::remove_if(values.begin(), values.end(), [&](const Value& v) { return !pred(v); }),
                 values.end());
  }
}

struct Context {
  std::string goal;
  std::vector<TraceStep> trace;
  std::vector<Value> candidates;
  std::size_t branches = 0;

  void record(Method method, const std::string& prefix, std::string detail) {
    trace.push_back({method, prefix + detail});
  }

  void add_candidate(const Rational& value, bool approximate) {
    Value v = approximate ? Value::approximate(value.to_double()) : Value(value);
    for (auto& c : candidates) {
      if (c.is_exact() && v.is_exact()) {
        if (c == v) return;
      } else if (close(c.to_double(), v.to_double())) {
        if (!c.is_exact() && v.is_exact()) c = v;
        return;
      }
    }
    candidates.push_back(std::move(v));
  }
};

std::string bindings_text(const std::vector<std::pair<std::string, Rational>>& order) {
  std::string out;
  for (const auto& [name, value] : order) {
    if (!out.empty()) out += ", ";
    out += name + " = " + value.to_string();
  }
  return out;
}

ForwardResult forward_pass(const EquationSystem& system, std::vector<std::pair<std::string, Rational>>* order) {
  std::vector<Equation> eqs = system.equations;
  Bindings bindings;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const Equation& eq = eqs[i];
      const bool lhs_ground = free_vars(eq.lhs).empty();
      const bool rhs_ground = free_vars(eq.rhs).empty();
      if (lhs_ground && rhs_ground) {
        if (eval_exact(eq.lhs) != eval_exact(eq.rhs)) {
          throw Error(ErrorCode::InconsistentBinding,
                      "equation '" + render_equation(eq) + "' contradicts earlier bindings");
        }
        eqs.erase(eqs.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
      std::string name;
      const Expr* value_side = nullptr;
      if (eq.lhs.is_var() && rhs_ground) {
        name = eq.lhs.var_name();
        value_side = &eq.rhs;
      } else if (eq.rhs.is_var() && lhs_ground) {
        name = eq.rhs.var_name();
        value_side = &eq.lhs;
      } else {
        continue;
      }
      const Rational value = eval_exact(*value_side);
      bindings.emplace(name, value);
      if (order) order->emplace_back(name, value);
      eqs.erase(eqs.begin() + static_cast<std::ptrdiff_t>(i));
      const Expr replacement = Expr::num(value);
      for (auto& other : eqs) {
        other.lhs = substitute(other.lhs, name, replacement);
        other.rhs = substitute(other.rhs, name, replacement);
      }
      changed = true;
      break;
    }
  }

  ForwardResult result;
  result.bindings = std::move(bindings);
  result.residual.goal = system.goal;
  result.residual.equations = std::move(eqs);
  for (const auto& u : system.unknowns) {
    if (!result.bindings.contains(u)) result.residual.unknowns.insert(u);
  }
  return result;
}

void validate(const EquationSystem& system) {
  if (!system.unknowns.contains(system.goal)) {
    throw Error(ErrorCode::InvalidArgument, "goal '" + system.goal + "' is not an unknown");
  }
  for (const auto& eq : system.equations) {
    for (const auto& name : vars_of(eq)) {
      if (!system.unknowns.contains(name)) {
        throw Error(ErrorCode::InvalidArgument, "'" + name + "' is not an unknown of the system");
      }
    }
  }
}

// Expression for `var` from a linear form in which it has a nonzero coefficient.
Expr isolate(const LinearForm& form, const std::string& var) {
  const Rational& coeff = form.coefficients.at(var);
  Expr rest = Expr::num(-form.constant);
  for (const auto& [name, c] : form.coefficients) {
    if (name == var) continue;
    rest = rest - Expr::num(c) * Expr::var(name);
  }
  return rest / Expr::num(coeff);
}

using NameSet = std::set<std::string, std::less<>>;

// `isolated` holds the variables already eliminated on this path.
void solve_branch(const EquationSystem& system, bool approximate, std::size_t depth, const std::string& prefix,
                  const NameSet& isolated, Context& ctx) {
  if (depth > kMaxDepth) throw Error(ErrorCode::Unsolvable, "elimination did not terminate");

  std::vector<std::pair<std::string, Rational>> order;
  ForwardResult fwd = forward_pass(system, &order);
  if (!order.empty()) ctx.record(Method::Substitution, prefix, bindings_text(order));

  if (auto it = fwd.bindings.find(ctx.goal); it != fwd.bindings.end()) {
    ctx.add_candidate(it->second, approximate);
    return;
  }
  const EquationSystem& residual = fwd.residual;
  if (residual.equations.empty()) {
    throw Error(ErrorCode::Underdetermined, "no equation constrains '" + ctx.goal + "'");
  }

  // linear residual
  std::vector<std::optional<LinearForm>> forms;
  bool all_linear = true;
  for (const auto& eq : residual.equations) {
    try {
      forms.emplace_back(linear_form(eq.lhs - eq.rhs));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonLinear) throw;
      forms.emplace_back(std::nullopt);
      all_linear = false;
    }
  }
  if (all_linear) {
    LinearSolution sol = solve_linear(residual);
    std::vector<std::pair<std::string, Rational>> solved(sol.values.begin(), sol.values.end());
    ctx.record(Method::LinearElimination, prefix,
               bindings_text(solved) + (sol.complete ? "" : " (goal pinned in an underdetermined system)"));
    ctx.add_candidate(sol.values.at(ctx.goal), approximate);
    return;
  }

  // a univariate equation, linear ones first
  std::optional<std::size_t> pick;
  for (int pass = 0; pass < 2 && !pick; ++pass) {
    for (std::size_t i = 0; i < residual.equations.size(); ++i) {
      if (vars_of(residual.equations[i]).size() != 1) continue;
      if (pass == 0 && !forms[i]) continue;
      pick = i;
      break;
    }
  }
  if (pick) {
    const Equation& eq = residual.equations[*pick];
    const std::string var = *vars_of(eq).begin();
    UnivariateSolution roots = solve_univariate_traced(eq, var);
    std::string listing;
    for (const auto& r : roots.roots) listing += (listing.empty() ? "" : ", ") + r.to_string();
    ctx.record(roots.method, prefix, render_equation(eq) + " -> " + var + " in {" + listing + "}");

    std::optional<Error> first_failure;
    const std::size_t before = ctx.candidates.size();
    for (const auto& root : roots.roots) {
      if (++ctx.branches > kMaxBranches) {
        throw Error(ErrorCode::Unsolvable, "more than " + std::to_string(kMaxBranches) + " branches");
      }
      const Rational value = root.is_exact() ? root.exact() : *Rational::from_double(root.to_double());
      EquationSystem next = residual;
      next.equations.push_back({Expr::var(var), Expr::num(value)});
      const std::string branch = prefix + "[" + var + " = " + root.to_string() + "] ";
      try {
        solve_branch(next, approximate || !root.is_exact(), depth + 1, branch, isolated, ctx);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Unsolvable && ctx.branches > kMaxBranches) throw;
        ctx.record(Method::Substitution, branch, std::string("rejected: ") + e.what());
        if (!first_failure) first_failure = e;
      }
    }
    if (ctx.candidates.size() == before && first_failure) throw *first_failure;
    return;
  }

  // no univariate equation: eliminate a variable of a linear equation from the nonlinear ones
  NameSet nonlinear_vars;
  for (std::size_t i = 0; i < residual.equations.size(); ++i) {
    if (!forms[i]) nonlinear_vars.merge(vars_of(residual.equations[i]));
  }
  for (std::size_t i = 0; i < residual.equations.size(); ++i) {
    if (!forms[i]) continue;
    const Equation& eq = residual.equations[i];
    if (eq.lhs.is_var() && isolated.contains(eq.lhs.var_name())) continue;
    for (const auto& [var, coeff] : forms[i]->coefficients) {
      if (!nonlinear_vars.contains(var) || isolated.contains(var)) continue;
      const Expr expr = isolate(*forms[i], var);
      NameSet eliminated = isolated;
      eliminated.insert(var);
      ctx.record(Method::Substitution, prefix, "isolate " + var + " = " + render(expr));
      EquationSystem next = residual;
      for (std::size_t j = 0; j < next.equations.size(); ++j) {
        if (j == i) {
          next.equations[j] = {Expr::var(var), expr};
        } else {
          next.equations[j].lhs = substitute(next.equations[j].lhs, var, expr);
          next.equations[j].rhs = substitute(next.equations[j].rhs, var, expr);
        }
      }
      solve_branch(next, approximate, depth + 1, prefix, eliminated, ctx);
      return;
    }
  }
  throw Error(ErrorCode::Unsolvable, "no strategy applies to the remaining " +
                                         std::to_string(residual.equations.size()) + " equations");
}

}  // namespace

double Value::to_double() const { return is_exact() ? exact().to_double() : std::get<double>(repr_); }

bool Value::is_nonnegative() const { return is_exact() ? exact().sign() >= 0 : std::get<double>(repr_) >= 0; }

bool Value::is_integer_valued() const {
  if (is_exact()) return exact().is_integer();
  const double v = std::get<double>(repr_);
  return std::fabs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::fabs(v));
}

std::string Value::to_string() const {
  if (is_exact()) return exact().to_string();
  char buf[64];
  std::snprintf(buf, sizeof buf, "~%.10g", std::get<double>(repr_));
  return buf;
}

std::ostream& operator<<(std::ostream& os, const Value& value) { return os << value.to_string(); }

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Substitution: return "substitution";
    case Method::LinearElimination: return "linear-elimination";
    case Method::Quadratic: return "quadratic";
    case Method::Numeric: return "numeric";
  }
  return "unknown";
}

std::string render_trace(const std::vector<TraceStep>& trace) {
  std::string out;
  for (const auto& step : trace) {
    out += to_string(step.method);
    out += ": ";
    out += step.detail;
    out += '\n';
  }
  return out;
}

EquationSystem system_from_script(const SolutionScript& script) {
  EquationSystem system;
  system.goal = script.goal;
  for (const auto& d : script.declarations) {
    if (const auto* v = std::get_if<VarDecl>(&d.body)) {
      system.unknowns.insert(v->name);
    } else if (const auto* e = std::get_if<EqDecl>(&d.body)) {
      system.equations.push_back({e->lhs, e->rhs});
    }
  }
  return system;
}

ForwardResult forward_substitute(const EquationSystem& system) {
  validate(system);
  return forward_pass(system, nullptr);
}

SolveOutcome solve_system(const EquationSystem& system) {
  validate(system);
  Context ctx;
  ctx.goal = system.goal;
  solve_branch(system, false, 0, "", {}, ctx);
  if (ctx.candidates.empty()) throw Error(ErrorCode::Unsolvable, "no candidate value for '" + system.goal + "'");
  SolveOutcome outcome;
  outcome.candidates = std::move(ctx.candidates);
  outcome.selected = select_answer(outcome.candidates);
  outcome.trace = std::move(ctx.trace);
  return outcome;
}

Value select_answer(std::span<const Value> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no candidates to select from");
  std::vector<Value> pool(candidates.begin(), candidates.end());
  if (pool.size() == 1) return pool.front();
  keep_if_any(pool, [](const Value& v) { return v.is_exact(); });
  keep_if_any(pool, [](const Value& v) { return v.is_nonnegative(); });
  keep_if_any(pool, [](const Value& v) { return v.is_integer_valued(); });
  const Value smallest = *std::min_element(pool.begin(), pool.end(), [](const Value& a, const Value& b) {
    return compare_magnitude(a, b) < 0;
  });
  keep_if_any(pool, [&](const Value& v) { return compare_magnitude(v, smallest) == 0; });
  return *std::min_element(pool.begin(), pool.end(),
                           [](const Value& a, const Value& b) { return compare_values(a, b) < 0; });
}

}  // namespace declsolve
