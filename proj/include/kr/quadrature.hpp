#pragma once

#include <array>

namespace kr {

/// Number of Gauss-Legendre nodes used per segment (and per axis in cells).
inline constexpr int kQuadratureNodes = 8;
/// Highest polynomial degree integrated exactly by the rule.
inline constexpr int kQuadratureExactDegree = 2 * kQuadratureNodes - 1;

struct QuadratureRule {
  /// Nodes in [0, 1], increasing.
  std::array<double, kQuadratureNodes> nodes;
  /// Weights summing to 1.
  std::array<double, kQuadratureNodes> weights;
};

/// Gauss-Legendre rule mapped to the unit interval.
const QuadratureRule& gauss_legendre();

}  // namespace kr
