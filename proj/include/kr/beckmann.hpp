#pragma once

#include <vector>

#include "kr/measures.hpp"

namespace kr {

struct NetworkEdge {
  int i = 0;
  int j = 0;
  double length = 0.0;
};

/// Undirected graph discretisation of the minimal-flow problem.
struct FlowNetwork {
  std::vector<Point> nodes;
  std::vector<NetworkEdge> edges;
  std::vector<double> supply;
  /// Worst-case ratio of the graph metric to the Euclidean metric for grid
  /// stencils; 1 for complete graphs.
  double anisotropy_bound = 1.0;

  /// Throws ValidationError on bad indices, nonpositive lengths or an
  /// unbalanced supply.
  void validate() const;
};

struct Flow {
  /// Signed flow per edge, positive in the i -> j orientation. Mass moves
  /// from positive to negative supply: inflow - outflow = -supply.
  std::vector<double> edge_flows;
  double cost = 0.0;
  /// Potential with |u_i - u_j| <= length and u_i - u_j = length along
  /// flow-carrying edges (flow i -> j); min u = 0.
  std::vector<double> potential;
};

/// Complete Euclidean graph over the support of f.
FlowNetwork complete_network(const SignedAtomMeasure& f);

/// Cell-centre graph on a regular grid with axis neighbours (and all
/// diagonal neighbours when `diagonals`); atoms are binned into the
/// containing cell, ties to the lower index.
FlowNetwork grid_network(const Domain& domain, const std::array<int, 3>& resolution,
                         const SignedAtomMeasure& f, bool diagonals = false);

/// Minimal total |flow|*length subject to the node balances. Throws
/// InfeasibleError when some component has nonzero net supply.
Flow solve_beckmann(const FlowNetwork& net);

/// Max over nodes of |inflow - outflow + supply|.
double balance_residual(const FlowNetwork& net, const Flow& flow);

/// Segments oriented against the flow with tangential density |flow|, so that
/// -div of the result equals the supply.
StructuredVectorMeasure flow_to_vector_measure(const FlowNetwork& net, const Flow& flow);

/// Worst-case graph/Euclidean distance ratio for a neighbour stencil given by
/// its step vectors (both signs implied).
double stencil_anisotropy(const std::vector<Vec>& steps);

}  // namespace kr
