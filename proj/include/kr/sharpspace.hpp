#pragma once

#include <optional>
#include <vector>

#include "kr/genplan.hpp"
#include "kr/matchnorm.hpp"
#include "kr/measures.hpp"

namespace kr {

/// nu = nu_T + nu_N against the tangent spaces of the structured class:
/// atoms have tangent space {0}, a segment the span of its direction, the
/// cell (volume) part all of R^N.
struct TangentialSplit {
  StructuredVectorMeasure tangential;
  StructuredVectorMeasure normal;
  double normal_mass = 0.0;
};

TangentialSplit tangential_split(const StructuredVectorMeasure& nu);

/// W1(-div nu, X0#) = int |nu_N|.
double distance_to_sharp(const StructuredVectorMeasure& nu);

/// 1-Lipschitz envelope witness with grad phi = nu_N/|nu_N| on the normal
/// support and phi(x_j) <= u_j on the given potential support.
struct DualWitness {
  TestFunction phi;
  /// Smallest gap between the active piece and the runner-up over the
  /// normal support check points; positive means phi is differentiable
  /// there with the intended gradient.
  double min_margin = 0.0;
  bool valid = false;
};

/// Builds the witness. `support`/`potential` describe a 1-Lipschitz
/// Kantorovich potential of the tangential part (may be empty). Only the
/// normal parts of `normal` matter; `max_radius` caps the offset of the
/// envelope pieces.
DualWitness build_dual_witness(const std::vector<Point>& support,
                               const std::vector<double>& potential,
                               const StructuredVectorMeasure& normal, double max_radius);

struct Decomposition {
  Distribution f_tangential;  // -div nu_T (atom form when it is a measure)
  Distribution f_normal;      // -div nu_N
  double normal_mass = 0.0;
  bool certified = false;
  /// Present when the tangential part is an atom measure.
  std::optional<double> w1_tangential;
  /// <f, witness> when a witness was built.
  std::optional<double> witness_value;
  /// W1(f_T) + |nu_N|, the certified value of W1(f) when `certified`.
  std::optional<double> w1_total;
};

/// f = f_T + f_N. Certified when an explicit 1-Lipschitz witness shows
/// W1(f) = W1(f_T) + |nu_N| within the tolerances; otherwise the split is
/// returned uncertified.
Decomposition decompose(const StructuredVectorMeasure& nu, double tol_abs = 1e-9,
                        double tol_rel = 1e-7);

/// |sigma_0| for sigma = from_plan(gamma_plus) + from_flow(normal_part).
double sigma_zero_distance(const Matching& gamma_plus, const StructuredVectorMeasure& normal_part);

struct ModulusSample {
  double eps = 0.0;
  double c_eps = 0.0;
  std::size_t k = 0;
  double certified_tail = 0.0;
};

struct ModulusCurve {
  std::vector<ModulusSample> samples;
};

/// For each eps, the smallest k with certified tail after k pairs <= eps,
/// and C_eps = 2k, so |<T,u>| <= C_eps |u|_inf + eps Lip(u). Throws
/// InfeasibleError when eps is below the certifiable floor.
ModulusCurve modulus(const DipoleChain& chain, const std::vector<double>& eps_list);

/// u(x) = h(w . x), h piecewise linear through (knots, values) and constant
/// outside the knot range.
struct RidgeProfile {
  Vec direction;  // unit
  std::vector<double> knots;
  std::vector<double> values;

  double value(const Point& x) const;
  double lipschitz() const;
  /// sup |u| over the box.
  double sup_norm(const Domain& box) const;
};

/// Worst slack C|u|_inf + eps Lip(u) - (|<T_listed,u>| + Lip(u) * tail) over
/// the profiles, for one modulus sample; nonnegative means the bound holds
/// for the full chain.
double modulus_slack(const DipoleChain& chain, const ModulusSample& sample,
                     const std::vector<RidgeProfile>& profiles, const Domain& box);

}  // namespace kr
