#pragma once

#include <vector>

namespace kr {

/// max c.x  s.t.  A x <= b, x >= 0, with b >= 0 so the origin is feasible.
struct DenseLP {
  int num_vars = 0;
  /// Row-major constraint rows, each of length num_vars.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> objective;

  void add_row(std::vector<double> row, double b);
};

struct LPSolution {
  std::vector<double> x;
  /// Multipliers of the constraint rows.
  std::vector<double> duals;
  double value = 0.0;
  int pivots = 0;
};

/// Dense tableau simplex with Bland's rule (no cycling). Throws
/// ValidationError for a negative rhs and InfeasibleError when unbounded.
LPSolution solve_lp(const DenseLP& lp, double eps = 1e-12);

}  // namespace kr
