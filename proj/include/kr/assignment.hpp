#pragma once

#include <vector>

namespace kr {

struct AssignmentResult {
  /// row_to_col[i] = column assigned to row i.
  std::vector<int> row_to_col;
  /// Row and column potentials with row[i] + col[j] <= cost(i, j), equality
  /// on assigned pairs.
  std::vector<double> row_potential;
  std::vector<double> col_potential;
};

/// Square linear assignment (minimisation) by the Hungarian method with
/// potentials, O(n^3). `cost` is row-major n x n.
AssignmentResult solve_assignment(const std::vector<double>& cost, int n);

}  // namespace kr
