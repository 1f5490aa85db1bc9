#include <algorithm>

#include "declsolve/errors.hpp"
#include "declsolve/solver.hpp"

namespace declsolve {

LinearSolution solve_linear(const EquationSystem& system) {
  std::vector<LinearForm> forms;
  forms.reserve(system.equations.size());
  std::set<std::string, std::less<>> names{system.goal};
  for (const auto& eq : system.equations) {
    forms.push_back(linear_form(eq.lhs - eq.rhs));
    for (const auto& [name, coeff] : forms.back().coefficients) names.insert(name);
  }

  const std::vector<std::string> columns(names.begin(), names.end());
  const std::size_t n = columns.size();
  const std::size_t m = forms.size();

  // augmented rows [a_0 .. a_{n-1} | b] for sum a_j x_j = b
  std::vector<std::vector<Rational>> rows(m, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto it = forms[i].coefficients.find(columns[j]);
      if (it != forms[i].coefficients.end()) rows[i][j] = it->second;
    }
    rows[i][n] = -forms[i].constant;
  }

  // reduced row echelon form, pivoting on the largest magnitude coefficient
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t best = rank;
    for (std::size_t i = rank + 1; i < m; ++i) {
      if (rows[i][col].abs() > rows[best][col].abs()) best = i;
    }
    if (rows[best][col].is_zero()) continue;
    std::swap(rows[rank], rows[best]);
    const Rational inv = rows[rank][col].reciprocal();
    for (std::size_t j = col; j <= n; ++j) rows[rank][j] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == rank || rows[i][col].is_zero()) continue;
      const Rational factor = rows[i][col];
      for (std::size_t j = col; j <= n; ++j) {
        if (!rows[rank][j].is_zero()) rows[i][j] -= factor * rows[rank][j];
      }
    }
    pivot_col.push_back(col);
    ++rank;
  }

  for (std::size_t i = rank; i < m; ++i) {
    if (!rows[i][n].is_zero()) {
      throw Error(ErrorCode::Inconsistent, "equations reduce to 0 = " + rows[i][n].to_string());
    }
  }

  LinearSolution solution;
  solution.complete = rank == n;
  for (std::size_t r = 0; r < rank; ++r) {
    bool pinned = true;
    for (std::size_t j = 0; j < n && pinned; ++j) {
      if (j != pivot_col[r] && !rows[r][j].is_zero()) pinned = false;
    }
    if (pinned) solution.values.emplace(columns[pivot_col[r]], rows[r][n]);
  }
  if (!solution.values.contains(system.goal)) {
    throw Error(ErrorCode::Underdetermined, "'" + system.goal + "' is not determined by the equations (rank " +
                                                std::to_string(rank) + " of " + std::to_string(n) + ")");
  }
  return solution;
}

}  // namespace declsolve
