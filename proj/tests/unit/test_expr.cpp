#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "declsolve/errors.hpp"
#include "declsolve/expr.hpp"
#include "declsolve/formal.hpp"
#include "generators.hpp"

using namespace declsolve;

namespace {

Expr p(std::string_view s) { return parse_expression(s); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Rational, CanonicalAfterConstruction) {
  const Rational r(BigInt(-6), BigInt(-4));
  EXPECT_EQ(r.numerator(), 3);
  EXPECT_EQ(r.denominator(), 2);
  EXPECT_TRUE(r.is_canonical());
  EXPECT_EQ(Rational(BigInt(4), BigInt(-8)).to_string(), "-1/2");
  EXPECT_EQ(Rational(BigInt(0), BigInt(-5)).denominator(), 1);
}

TEST(Rational, ZeroDenominatorThrows) {
  EXPECT_EQ(code_of([] { Rational(BigInt(1), BigInt(0)); }), ErrorCode::DivisionByZero);
  EXPECT_EQ(code_of([] { (void)(Rational(1) / Rational(0)); }), ErrorCode::DivisionByZero);
  EXPECT_EQ(code_of([] { (void)Rational(0).reciprocal(); }), ErrorCode::DivisionByZero);
}

TEST(Rational, ParsesDecimalsAndFractions) {
  EXPECT_EQ(Rational::parse("0.25"), Rational(BigInt(1), BigInt(4)));
  EXPECT_EQ(Rational::parse("-3/6"), Rational(BigInt(-1), BigInt(2)));
  EXPECT_EQ(Rational::parse(".5"), Rational(BigInt(1), BigInt(2)));
  EXPECT_EQ(Rational::parse("120"), Rational(120));
  EXPECT_FALSE(Rational::try_parse("1/0"));
  EXPECT_FALSE(Rational::try_parse("1.2.3"));
  EXPECT_FALSE(Rational::try_parse(""));
  EXPECT_FALSE(Rational::try_parse("abc"));
}

TEST(Rational, BigValuesStayExact) {
  const Rational big = Rational(10).pow(40) + Rational(1);
  EXPECT_EQ(big.to_string(), "10000000000000000000000000000000000000001");
  EXPECT_EQ((big - Rational(10).pow(40)), Rational(1));
  EXPECT_EQ(Rational(2).pow(-3), Rational(BigInt(1), BigInt(8)));
}

TEST(Rational, ExactSqrt) {
  EXPECT_EQ(*Rational(BigInt(9), BigInt(4)).exact_sqrt(), Rational(BigInt(3), BigInt(2)));
  EXPECT_FALSE(Rational(2).exact_sqrt());
  EXPECT_FALSE(Rational(-4).exact_sqrt());
}

TEST(Rational, RandomArithmeticIsCanonical) {
  testkit::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Rational a = testkit::random_rational(rng, 1000, 1000);
    const Rational b = testkit::random_rational(rng, 1000, 1000);
    EXPECT_TRUE((a + b).is_canonical());
    EXPECT_TRUE((a - b).is_canonical());
    EXPECT_TRUE((a * b).is_canonical());
    if (!b.is_zero()) {
      EXPECT_TRUE((a / b).is_canonical());
      EXPECT_EQ((a / b) * b, a);
    }
  }
}

TEST(EvalExact, ConstantsAndBindings) {
  EXPECT_EQ(eval_exact(p("2 + 3")), Rational(5));
  // 7/2 * 4 = 28/2 = 14
  EXPECT_EQ(eval_exact(p("(7/2) * 4")), Rational(14));
  // 3^2 - 1 = 8
  EXPECT_EQ(eval_exact(p("x^2 - y"), {{"x", 3}, {"y", 1}}), Rational(8));
}

TEST(EvalExact, Errors) {
  EXPECT_EQ(code_of([] { eval_exact(p("x + 1")); }), ErrorCode::UnboundVariable);
  EXPECT_EQ(code_of([] { eval_exact(p("1 / (2 - 2)")); }), ErrorCode::DivisionByZero);
  EXPECT_EQ(code_of([] { eval_exact(p("2 ^ 0.5")); }), ErrorCode::NonIntegerExponent);
  EXPECT_EQ(code_of([] { eval_exact(p("0 ^ -1")); }), ErrorCode::DivisionByZero);
  EXPECT_EQ(code_of([] { eval_exact(p("10 ^ 10000000")); }), ErrorCode::ExponentTooLarge);
}

TEST(EvalExact, NegativeExponent) { EXPECT_EQ(eval_exact(p("2 ^ -2")), Rational(BigInt(1), BigInt(4))); }

TEST(EvalApprox, DivisionByZeroIsNotFinite) {
  EXPECT_FALSE(std::isfinite(eval_approx(p("1 / x"), {{"x", 0.0}})));
  EXPECT_DOUBLE_EQ(eval_approx(p("x ^ 0.5"), {{"x", 4.0}}), 2.0);
}

TEST(Substitute, Examples) {
  EXPECT_EQ(substitute(p("x + y"), "x", Expr::num(5)), p("5 + y"));
  EXPECT_EQ(substitute(p("x * x"), "x", p("a + 1")), p("(a + 1) * (a + 1)"));
  EXPECT_EQ(substitute(p("y"), "x", Expr::num(5)), p("y"));
}

TEST(Substitute, IdentityAndHomomorphism) {
  testkit::Rng rng(11);
  const std::vector<std::string> vars{"x", "y", "z"};
  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    const Expr e = testkit::random_expr(rng, 5, vars);
    EXPECT_EQ(substitute(e, "x", Expr::var("x")), e);

    const Rational c = testkit::random_rational(rng, 9, 4);
    const Bindings rest{{"y", testkit::random_rational(rng, 9, 4)}, {"z", testkit::random_rational(rng, 9, 4)}};
    Bindings all = rest;
    all["x"] = c;
    Rational expected;
    try {
      expected = eval_exact(e, all);
    } catch (const Error&) {
      continue;
    }
    EXPECT_EQ(eval_exact(substitute(e, "x", Expr::num(c)), rest), expected) << render(e);
    ++compared;
  }
  EXPECT_GT(compared, 100);
}

TEST(FreeVars, Examples) {
  EXPECT_TRUE(free_vars(p("2 + 3")).empty());
  EXPECT_EQ(free_vars(p("x + 2*y")), (std::set<std::string, std::less<>>{"x", "y"}));
  EXPECT_EQ(free_vars(p("x + x")).size(), 1u);
}

TEST(LinearForm, Examples) {
  // 2x + 3 - x = x + 3
  const LinearForm f = linear_form(p("2*x + 3 - x"));
  EXPECT_EQ(f.coefficients.size(), 1u);
  EXPECT_EQ(f.coefficients.at("x"), Rational(1));
  EXPECT_EQ(f.constant, Rational(3));
  EXPECT_TRUE(linear_form(p("7")).is_constant());
  EXPECT_EQ(linear_form(p("7")).constant, Rational(7));
  EXPECT_EQ(code_of([] { linear_form(p("x * y")); }), ErrorCode::NonLinear);
  EXPECT_EQ(code_of([] { linear_form(p("1 / x")); }), ErrorCode::NonLinear);
  EXPECT_EQ(code_of([] { linear_form(p("x / 0")); }), ErrorCode::DivisionByZero);
}

TEST(LinearForm, CancellationDropsZeroCoefficients) {
  const LinearForm f = linear_form(p("x - x + y * 2 / 4"));
  EXPECT_FALSE(f.coefficients.contains("x"));
  EXPECT_EQ(f.coefficients.at("y"), Rational(BigInt(1), BigInt(2)));
}

TEST(LinearForm, AgreesWithEvaluationOnRandomLinearExprs) {
  testkit::Rng rng(3);
  const std::vector<std::string> vars{"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<int> shape(0, 4);
  std::uniform_int_distribution<std::size_t> var(0, vars.size() - 1);
  for (int i = 0; i < 300; ++i) {
    Expr e = Expr::num(testkit::random_rational(rng, 20, 5));
    for (int t = 0; t < 6; ++t) {
      const Expr term = Expr::num(testkit::random_rational(rng, 9, 3)) * Expr::var(vars[var(rng)]);
      switch (shape(rng)) {
        case 0: e = e + term; break;
        case 1: e = e - term; break;
        case 2: e = e * Expr::num(testkit::random_rational(rng, 5, 3)); break;
        case 3: e = (e + term) / Expr::num(Rational(BigInt(3), BigInt(2))); break;
        default: e = -e + term;
      }
    }
    const LinearForm f = linear_form(e);
    Bindings b;
    for (const auto& v : vars) b[v] = testkit::random_rational(rng, 50, 7);
    Rational via_form = f.constant;
    for (const auto& [name, coeff] : f.coefficients) via_form += coeff * b.at(name);
    EXPECT_EQ(eval_exact(e, b), via_form) << render(e);
  }
}

TEST(Render, CanonicalText) {
  EXPECT_EQ(render(p("2 + 3 * 4")), "(2 + (3 * 4))");
  EXPECT_EQ(render(p("-x")), "(-x)");
  EXPECT_EQ(render(p("0.5 * total")), "((1/2) * total)");
  EXPECT_EQ(render(Expr::num(Rational(-3))), "(-3)");
}

TEST(Depth, CountsLevels) {
  EXPECT_EQ(depth(p("x")), 1u);
  EXPECT_EQ(depth(p("1 + 2 * 3")), 3u);
}
