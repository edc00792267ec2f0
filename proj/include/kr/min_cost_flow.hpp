#pragma once

#include <span>
#include <vector>

namespace kr {

/// Uncapacitated transshipment on a directed graph with nonnegative real arc
/// costs, solved by successive shortest paths with node potentials
/// (multi-source Dijkstra on reduced costs).
///
/// Ties are broken by node index and arc insertion order, so the result is a
/// deterministic function of the input.
class MinCostFlow {
 public:
  explicit MinCostFlow(int num_nodes);

  /// Adds an arc from -> to with unbounded capacity. Returns its index.
  int add_arc(int from, int to, double cost);

  struct Result {
    /// Flow per arc, in insertion order.
    std::vector<double> arc_flow;
    /// Dual potentials: cost + pi[from] - pi[to] >= 0 on every residual arc,
    /// with equality on arcs carrying flow.
    std::vector<double> potential;
    double cost = 0.0;
    int augmentations = 0;
  };

  /// Routes `supply` (positive = source, negative = sink). Amounts below
  /// zero_tol * sum|supply| are treated as settled. Throws InfeasibleError
  /// if some positive supply cannot reach any remaining sink.
  Result solve(std::span<const double> supply, double zero_tol = 1e-12) const;

  int num_nodes() const { return num_nodes_; }
  int num_arcs() const { return static_cast<int>(from_.size()); }

 private:
  int num_nodes_;
  std::vector<int> from_;
  std::vector<int> to_;
  std::vector<double> cost_;
  std::vector<std::vector<int>> out_;  // arc ids leaving each node
  std::vector<std::vector<int>> in_;   // arc ids entering each node
};

}  // namespace kr
