#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "declsolve/errors.hpp"
#include "declsolve/solver.hpp"
#include "polynomial.hpp"

namespace declsolve {

namespace {

using detail::Poly;
using detail::RationalFunction;
using Fn = std::function<long double(long double)>;

constexpr long double kConvergence = 1e-9L;
constexpr double kDedupe = 1e-7;
constexpr int kBracketIterations = 200;
constexpr int kNewtonIterations = 100;
constexpr long kMaxSnapDenominator = 1000;

bool finite(long double v) { return std::isfinite(v); }

// 0 and +-10^(k/4) for k = -24..24, i.e. log-spaced over [1e-6, 1e6] on both sides.
std::vector<long double> start_points() {
  std::vector<long double> pts{0.0L};
  for (int k = -24; k <= 24; ++k) {
    const long double x = std::pow(10.0L, static_cast<long double>(k) / 4.0L);
    pts.push_back(x);
    pts.push_back(-x);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

long double slope(const Fn& f, long double x) {
  const long double h = 1e-7L * std::max(1.0L, std::fabs(x));
  return (f(x + h) - f(x - h)) / (2 * h);
}

// Safeguarded Newton inside a sign-changing bracket.
std::optional<long double> bracketed_root(const Fn& f, const Fn& df, long double lo, long double hi) {
  long double flo = f(lo);
  long double x = (lo + hi) / 2;
  for (int i = 0; i < kBracketIterations; ++i) {
    const long double fx = f(x);
    if (!finite(fx)) return std::nullopt;
    if (std::fabs(fx) < kConvergence * 1e-3L) return x;
    if ((fx < 0) == (flo < 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const long double d = df(x);
    long double next = (d != 0 && finite(d)) ? x - fx / d : lo - 1;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    if (next == x) break;
    x = next;
  }
  const long double fx = f(x);
  if (finite(fx) && std::fabs(fx) < kConvergence) return x;
  return std::nullopt;
}

std::optional<long double> newton_from(const Fn& f, const Fn& df, long double x) {
  for (int i = 0; i < kNewtonIterations; ++i) {
    const long double fx = f(x);
    if (!finite(fx)) return std::nullopt;
    if (std::fabs(fx) < kConvergence * 1e-3L) return x;
    const long double d = df(x);
    if (d == 0 || !finite(d)) break;
    const long double next = x - fx / d;
    if (!finite(next) || std::fabs(next) > 1e12L) return std::nullopt;
    if (next == x) break;
    x = next;
  }
  const long double fx = f(x);
  if (finite(fx) && std::fabs(fx) < kConvergence) return x;
  return std::nullopt;
}

bool near(double a, double b) { return std::fabs(a - b) <= kDedupe * std::max(1.0, std::fabs(a)); }

void add_root(std::vector<double>& roots, long double r) {
  const double v = static_cast<double>(r);
  if (std::none_of(roots.begin(), roots.end(), [&](double x) { return near(x, v); })) roots.push_back(v);
}

std::vector<double> numeric_roots(const Fn& f, const Fn& df) {
  const auto pts = start_points();
  std::vector<long double> vals;
  vals.reserve(pts.size());
  bool any_finite = false;
  for (long double x : pts) {
    vals.push_back(f(x));
    any_finite = any_finite || finite(vals.back());
  }
  if (!any_finite) throw Error(ErrorCode::NumericDivergence, "function is undefined at every starting point");

  std::vector<double> roots;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (finite(vals[i]) && std::fabs(vals[i]) < kConvergence) add_root(roots, pts[i]);
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!finite(vals[i]) || !finite(vals[i + 1])) continue;
    if ((vals[i] < 0) == (vals[i + 1] < 0)) continue;
    if (auto r = bracketed_root(f, df, pts[i], pts[i + 1])) add_root(roots, *r);
  }
  for (long double x : pts) {
    if (auto r = newton_from(f, df, x)) add_root(roots, *r);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Continued-fraction convergents of x with bounded denominators.
std::vector<Rational> nearby_rationals(double x) {
  std::vector<Rational> out;
  if (!std::isfinite(x) || std::fabs(x) > 1e12) return out;
  BigInt h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  double rest = x;
  for (int i = 0; i < 20; ++i) {
    const double a = std::floor(rest);
    const BigInt ai(a);
    const BigInt h = ai * h_prev + h_prev2;
    const BigInt k = ai * k_prev + k_prev2;
    if (k > kMaxSnapDenominator) break;
    out.emplace_back(h, k);
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const double frac = rest - a;
    if (frac < 1e-12) break;
    rest = 1.0 / frac;
  }
  return out;
}

// An approximate root that is really a small-denominator rational becomes exact.
Value snapped(double root, const std::function<bool(const Rational&)>& is_exact_root) {
  for (const Rational& q : nearby_rationals(root)) {
    if (std::fabs(q.to_double() - root) > kDedupe * std::max(1.0, std::fabs(root))) continue;
    if (is_exact_root(q)) return q;
  }
  return Value::approximate(root);
}

void push_unique(std::vector<Value>& roots, Value v) {
  for (const auto& r : roots) {
    if (r.is_exact() && v.is_exact() ? r == v : near(r.to_double(), v.to_double())) return;
  }
  roots.push_back(std::move(v));
}

std::vector<Value> quadratic_roots(const Poly& p) {
  const Rational& c = p.coeff(0);
  const Rational& b = p.coeff(1);
  const Rational& a = p.coeff(2);
  const Rational disc = b * b - Rational(4) * a * c;
  if (disc.sign() < 0) throw Error(ErrorCode::NoRealRoot, "negative discriminant");
  std::vector<Value> roots;
  if (auto s = disc.exact_sqrt()) {
    const Rational two_a = Rational(2) * a;
    push_unique(roots, (-b - *s) / two_a);
    push_unique(roots, (-b + *s) / two_a);
    return roots;
  }
  // stable form: q = -(b + sign(b) sqrt(disc)) / 2, roots q/a and c/q
  const long double A = a.to_double();
  const long double B = b.to_double();
  const long double C = c.to_double();
  const long double root_disc = std::sqrt(static_cast<long double>(disc.to_double()));
  const long double q = -0.5L * (B + (B < 0 ? -root_disc : root_disc));
  std::vector<long double> raw{q / A, C / q};
  for (long double& r : raw) {
    // one Newton polish step in extended precision
    const long double d = p.derivative_at(r);
    if (d != 0) r -= p.eval(r) / d;
  }
  std::sort(raw.begin(), raw.end());
  for (long double r : raw) push_unique(roots, Value::approximate(static_cast<double>(r)));
  return roots;
}

UnivariateSolution solve_polynomial(const RationalFunction& rf) {
  const Poly& p = rf.num;
  if (p.is_zero()) throw Error(ErrorCode::Underdetermined, "equation holds for every value");
  if (p.degree() == 0) throw Error(ErrorCode::NoRealRoot, "equation reduces to a false constant statement");

  UnivariateSolution sol;
  if (p.degree() == 1) {
    sol.method = Method::LinearElimination;
    sol.roots.push_back(-p.coeff(0) / p.coeff(1));
  } else if (p.degree() == 2) {
    sol.method = Method::Quadratic;
    sol.roots = quadratic_roots(p);
  } else {
    sol.method = Method::Numeric;
    const Fn f = [&](long double x) { return p.eval(x); };
    const Fn df = [&](long double x) { return p.derivative_at(x); };
    for (double r : numeric_roots(f, df)) {
      push_unique(sol.roots, snapped(r, [&](const Rational& q) { return p.eval(q).is_zero(); }));
    }
  }

  // drop roots that zero a cleared denominator
  std::vector<Value> kept;
  for (auto& r : sol.roots) {
    const bool pole = r.is_exact() ? rf.den.eval(r.exact()).is_zero()
                                   : std::fabs(rf.den.eval(static_cast<long double>(r.to_double()))) < 1e-12L;
    if (!pole) kept.push_back(std::move(r));
  }
  sol.roots = std::move(kept);
  return sol;
}

}  // namespace

UnivariateSolution solve_univariate_traced(const Equation& equation, const std::string& var) {
  const Expr f = equation.lhs - equation.rhs;
  for (const auto& name : free_vars(f)) {
    if (name != var) {
      throw Error(ErrorCode::InvalidArgument, "equation mentions '" + name + "' besides '" + var + "'");
    }
  }

  UnivariateSolution sol;
  if (auto rf = detail::to_rational_function(f, var)) {
    sol = solve_polynomial(*rf);
  } else {
    sol.method = Method::Numeric;
    const Fn fn = [&](long double x) -> long double {
      std::map<std::string, double, std::less<>> b{{var, static_cast<double>(x)}};
      return eval_approx(f, b);
    };
    const Fn dfn = [&](long double x) { return slope(fn, x); };
    for (double r : numeric_roots(fn, dfn)) {
      push_unique(sol.roots, snapped(r, [&](const Rational& q) {
                    try {
                      return eval_exact(f, Bindings{{var, q}}).is_zero();
                    } catch (const Error&) {
                      return false;
                    }
                  }));
    }
  }
  if (sol.roots.empty()) throw Error(ErrorCode::NoRealRoot, "no real root of '" + render(f) + " = 0'");
  return sol;
}

std::vector<Value> solve_univariate(const Equation& equation, const std::string& var) {
  return solve_univariate_traced(equation, var).roots;
}

}  // namespace declsolve
