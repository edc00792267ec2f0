#include "kr/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace kr {
namespace {

QuadratureRule build_rule() {
  constexpr int n = kQuadratureNodes;
  QuadratureRule rule{};
  // Newton iteration on P_n from the Chebyshev-like initial guess; roots come
  // out in decreasing order on [-1, 1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre() {
  static const QuadratureRule rule = build_rule();
  return rule;
}

}  // namespace kr
