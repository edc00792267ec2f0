#pragma once

#include <vector>

#include "kr/measures.hpp"

namespace kr {

struct MatchingEdge {
  Point source;  // positive atom
  Point target;  // negative atom
  double mass = 0.0;
  std::size_t source_index = 0;  // atom index in the measure
  std::size_t target_index = 0;
};

/// Transport plan between the positive and negative parts of a measure.
struct Matching {
  std::vector<MatchingEdge> edges;
  double cost = 0.0;
  /// Kantorovich pair for the transport LP: source_potential[i] -
  /// target_potential[j] <= |x_i - y_j| with equality on edges; indexed like
  /// positive_indices() / negative_indices().
  std::vector<double> source_potential;
  std::vector<double> target_potential;
};

/// Kantorovich potential on the atom support.
struct Potential {
  std::vector<Point> points;
  std::vector<double> values;
  /// max |u(x)-u(y)| / |x-y| over support pairs.
  double lip_bound = 0.0;

  double max_violation() const;  // max(|u_i-u_j| - |x_i-x_j|) over pairs
};

/// Min-cost transport from f+ to f- under Euclidean cost (W1). Uses the
/// Hungarian method when all masses share one absolute value and successive
/// shortest paths otherwise. Throws ValidationError when f is unbalanced.
Matching minimal_connection(const SignedAtomMeasure& f);

/// Sum of mass*|x-y| over edges in (source, target) index order.
double matching_cost(const std::vector<MatchingEdge>& edges);

struct DualResult {
  Potential potential;
  double value = 0.0;
  int pivots = 0;
};

/// max sum m_i u_i s.t. |u_i - u_j| <= |x_i - x_j| for all support pairs,
/// solved as a dense LP; the potential is shifted so that min u = 0.
DualResult dual_potential(const SignedAtomMeasure& f);

enum class FlatConvention { kMax, kSum };

struct FlatNormResult {
  double value = 0.0;
  std::vector<double> potential;  // u on the support
  double lipschitz_budget = 1.0;  // L for the sum form, 1 for the max form
};

/// Flat norm: sup <f,u> over u with |u| <= 1 and Lip(u) <= 1 (max form) or
/// |u| + Lip(u) <= 1 (sum form), on the atom support.
FlatNormResult flat_norm(const SignedAtomMeasure& f, FlatConvention convention);

/// Exhaustive minimum of sum |p_i - n_pi(i)| over permutations; unit
/// masses and at most 7 dipoles.
double brute_force_connection(const SignedAtomMeasure& f);

}  // namespace kr
