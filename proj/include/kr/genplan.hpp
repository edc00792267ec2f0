#pragma once

#include <string>
#include <vector>

#include "kr/matchnorm.hpp"
#include "kr/measures.hpp"

namespace kr {

/// Atom of a generalized plan at (x, v, t) in Omega x S^{N-1} x [0, inf).
struct PlanAtom {
  Point base;
  Vec dir;  // unit
  double t = 0.0;
  double mass = 0.0;
};

/// Positive measure on Omega x S^{N-1} x [0, inf). Atoms with t == 0 form
/// sigma_0 (flux elements), atoms with t > 0 form sigma_+ (transport rays).
struct GeneralizedPlan {
  std::vector<PlanAtom> atoms;

  double total_variation() const;
  /// Throws ValidationError on non-unit directions, t < 0 or mass <= 0.
  void validate() const;
  GeneralizedPlan operator+(const GeneralizedPlan& o) const;
};

/// D_phi(x, v, t): (phi(x+tv) - phi(x))/t for t > 0, grad phi(x).v for t = 0.
double difference_quotient(const TestFunction& phi, const PlanAtom& atom);

/// sum mass * D_phi over the plan.
double pair_plan(const GeneralizedPlan& sigma, const TestFunction& phi);

struct ProjectionReport {
  double max_residual = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> residuals;  // per family member
  bool pass = false;
  double tolerance = 0.0;
  /// A finite family only gives necessary evidence for the identity.
  std::string note;
};

/// Compares pair_plan(sigma, phi) with <f, phi> over `family`.
ProjectionReport verify_projection(const GeneralizedPlan& sigma, const Distribution& f,
                                   const std::vector<TestFunction>& family, double tol);

/// Edge (x -> y, m) becomes an atom at base y pointing to x with t = |x-y|
/// and mass m|x-y|; edges with x == y are dropped.
GeneralizedPlan from_plan(const Matching& gamma);

/// Flux atoms (t = 0): vector atoms directly, segments through their
/// quadrature nodes. Throws ValidationError on cells or zero vectors.
GeneralizedPlan from_flow(const StructuredVectorMeasure& nu);

/// nu_0 + nu_+: t = 0 atoms become vector atoms, t > 0 atoms become
/// tangential segments x -> x+tv with density (m/t) v.
StructuredVectorMeasure to_vector_measure(const GeneralizedPlan& sigma);

struct PlanSplit {
  GeneralizedPlan zero;      // t == 0
  GeneralizedPlan positive;  // t > 0
};

PlanSplit split(const GeneralizedPlan& sigma);

}  // namespace kr
