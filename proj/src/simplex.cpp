#include "kr/simplex.hpp"

#include <cmath>
#include <limits>

#include "kr/error.hpp"

namespace kr {

void DenseLP::add_row(std::vector<double> row, double b) {
  if (static_cast<int>(row.size()) != num_vars) throw ValidationError("LP row has wrong width");
  rows.push_back(std::move(row));
  rhs.push_back(b);
}

LPSolution solve_lp(const DenseLP& lp, double eps) {
  const int m = static_cast<int>(lp.rows.size());
  const int n = lp.num_vars;
  if (static_cast<int>(lp.rhs.size()) != m || static_cast<int>(lp.objective.size()) != n) {
    throw ValidationError("inconsistent LP dimensions");
  }
  const auto W = static_cast<std::size_t>(n + 1);
  // Row i < m: [A_i | b_i]; row m: [-c | value].
  std::vector<double> D(static_cast<std::size_t>(m + 1) * W, 0.0);
  auto at = [&](int i, int j) -> double& {
    return D[static_cast<std::size_t>(i) * W + static_cast<std::size_t>(j)];
  };
  std::vector<int> basic(static_cast<std::size_t>(m)), nonbasic(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i) {
    if (lp.rhs[static_cast<std::size_t>(i)] < 0.0) {
      throw ValidationError("LP rhs must be nonnegative");
    }
    for (int j = 0; j < n; ++j) at(i, j) = lp.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    at(i, n) = lp.rhs[static_cast<std::size_t>(i)];
    basic[static_cast<std::size_t>(i)] = n + i;
  }
  for (int j = 0; j < n; ++j) {
    at(m, j) = -lp.objective[static_cast<std::size_t>(j)];
    nonbasic[static_cast<std::size_t>(j)] = j;
  }

  auto pivot = [&](int r, int s) {
    const double inv = 1.0 / at(r, s);
    for (int i = 0; i <= m; ++i) {
      if (i == r) continue;
      const double f = at(i, s) * inv;
      if (f == 0.0) continue;
      for (int j = 0; j <= n; ++j) {
        if (j != s) at(i, j) -= at(r, j) * f;
      }
      at(i, s) = -f;
    }
    for (int j = 0; j <= n; ++j) {
      if (j != s) at(r, j) *= inv;
    }
    at(r, s) = inv;
    std::swap(basic[static_cast<std::size_t>(r)], nonbasic[static_cast<std::size_t>(s)]);
  };

  LPSolution sol;
  for (;;) {
    int s = -1;
    for (int j = 0; j < n; ++j) {
      if (at(m, j) < -eps &&
          (s < 0 || nonbasic[static_cast<std::size_t>(j)] < nonbasic[static_cast<std::size_t>(s)])) {
        s = j;
      }
    }
    if (s < 0) break;
    int r = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (at(i, s) <= eps) continue;
      const double ratio = at(i, n) / at(i, s);
      if (r < 0 || ratio < best - 1e-15 * std::abs(best) ||
          (ratio <= best + 1e-15 * std::abs(best) &&
           basic[static_cast<std::size_t>(i)] < basic[static_cast<std::size_t>(r)])) {
        r = i;
        best = std::min(best, ratio);
      }
    }
    if (r < 0) throw InfeasibleError("LP is unbounded");
    pivot(r, s);
    ++sol.pivots;
  }

  sol.x.assign(static_cast<std::size_t>(n), 0.0);
  sol.duals.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const int b = basic[static_cast<std::size_t>(i)];
    if (b < n) sol.x[static_cast<std::size_t>(b)] = at(i, n);
  }
  for (int j = 0; j < n; ++j) {
    const int v = nonbasic[static_cast<std::size_t>(j)];
    if (v >= n) sol.duals[static_cast<std::size_t>(v - n)] = at(m, j);
  }
  sol.value = at(m, n);
  return sol;
}

}  // namespace kr
