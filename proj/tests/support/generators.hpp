#pragma once

#include <random>
#include <string>
#include <vector>

#include "declsolve/expr.hpp"
#include "declsolve/solver.hpp"

namespace declsolve::testkit {

using Rng = std::mt19937_64;

inline Rational random_rational(Rng& rng, long max_num, long max_den) {
  std::uniform_int_distribution<long> num(-max_num, max_num);
  std::uniform_int_distribution<long> den(1, max_den);
  return Rational(BigInt(num(rng)), BigInt(den(rng)));
}

// Trees the parser can produce: literals are nonnegative (a negative value
// is spelled as a negation).
inline Expr random_expr(Rng& rng, int max_depth, const std::vector<std::string>& vars) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int choice = max_depth <= 1 ? pick(rng) % 3 : pick(rng);
  switch (choice) {
    case 0: {
      std::uniform_int_distribution<long> n(0, 1000);
      std::uniform_int_distribution<long> d(1, 12);
      return Expr::num(Rational(BigInt(n(rng)), BigInt(d(rng) <= 8 ? 1 : d(rng))));
    }
    case 1:
    case 2: {
      std::uniform_int_distribution<std::size_t> v(0, vars.size() - 1);
      return Expr::var(vars[v(rng)]);
    }
    case 3: return Expr::neg(random_expr(rng, max_depth - 1, vars));
    default: {
      static constexpr BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow};
      std::uniform_int_distribution<int> op(0, 4);
      return Expr::binary(ops[op(rng)], random_expr(rng, max_depth - 1, vars), random_expr(rng, max_depth - 1, vars));
    }
  }
}

inline std::string unknown_name(std::size_t i) { return "x" + std::to_string(i); }

struct LinearCase {
  EquationSystem system;
  std::vector<Rational> solution;
};

// Fraction-free elimination on the integer matrix; nonzero means full rank.
inline bool full_rank(std::vector<std::vector<BigInt>> a) {
  const std::size_t n = a.size();
  BigInt prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    if (p == n) return false;
    std::swap(a[p], a[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return true;
}

// Square system with integer coefficients in [-9, 9] around a known
// rational solution; the goal is a random unknown.
inline LinearCase random_linear_system(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<long> coeff(-9, 9);
  std::vector<std::vector<BigInt>> a;
  do {
    a.assign(n, std::vector<BigInt>(n));
    for (auto& row : a) {
      for (auto& c : row) c = coeff(rng);
    }
  } while (!full_rank(a));

  LinearCase c;
  for (std::size_t j = 0; j < n; ++j) c.solution.push_back(random_rational(rng, 20, 6));
  for (std::size_t i = 0; i < n; ++i) {
    Rational rhs;
    Expr lhs = Expr::num(Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
      rhs += Rational(a[i][j]) * c.solution[j];
      lhs = lhs + Expr::num(Rational(a[i][j])) * Expr::var(unknown_name(j));
    }
    c.system.equations.push_back({lhs, Expr::num(rhs)});
  }
  for (std::size_t j = 0; j < n; ++j) c.system.unknowns.insert(unknown_name(j));
  std::uniform_int_distribution<std::size_t> g(0, n - 1);
  c.system.goal = unknown_name(g(rng));
  return c;
}

// a*x^2 + b*x + c as an expression in `x`.
inline Expr quadratic(const Rational& a, const Rational& b, const Rational& c) {
  const Expr x = Expr::var("x");
  return Expr::num(a) * pow(x, Expr::num(2)) + Expr::num(b) * x + Expr::num(c);
}

}  // namespace declsolve::testkit
