#include "kr/assignment.hpp"

#include <limits>

#include "kr/error.hpp"

namespace kr {

AssignmentResult solve_assignment(const std::vector<double>& cost, int n) {
  if (n < 0 || cost.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw ValidationError("assignment cost matrix has the wrong size");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const auto sz = static_cast<std::size_t>(n) + 1;
  auto c = [&](int i, int j) {
    return cost[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(j - 1)];
  };
  // 1-based with a virtual column 0; p[j] = row matched to column j.
  std::vector<double> u(sz, 0.0), v(sz, 0.0);
  std::vector<int> p(sz, 0), way(sz, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(sz, kInf);
    std::vector<char> used(sz, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (used[jj]) continue;
        const double cur = c(i0, j) - u[static_cast<std::size_t>(i0)] - v[jj];
        if (cur < minv[jj]) {
          minv[jj] = cur;
          way[jj] = j0;
        }
        if (minv[jj] < delta) {
          delta = minv[jj];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (used[jj]) {
          u[static_cast<std::size_t>(p[jj])] += delta;
          v[jj] -= delta;
        } else {
          minv[jj] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  AssignmentResult r;
  r.row_to_col.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    r.row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  r.row_potential.assign(u.begin() + 1, u.end());
  r.col_potential.assign(v.begin() + 1, v.end());
  return r;
}

}  // namespace kr
