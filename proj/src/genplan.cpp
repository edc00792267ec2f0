#include "kr/genplan.hpp"

#include <cmath>

#include "kr/error.hpp"
#include "kr/quadrature.hpp"

namespace kr {

double GeneralizedPlan::total_variation() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}

void GeneralizedPlan::validate() const {
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto& a = atoms[k];
    const std::string where = " (plan atom " + std::to_string(k) + ")";
    if (!a.base.finite() || !a.dir.finite() || !std::isfinite(a.t) || !std::isfinite(a.mass)) {
      throw ValidationError("non-finite value" + where);
    }
    if (a.base.dim != a.dir.dim) throw ValidationError("dimension mismatch" + where);
    if (std::abs(norm(a.dir) - 1.0) > 1e-12) throw ValidationError("direction is not unit" + where);
    if (a.t < 0.0) throw ValidationError("negative t" + where);
    if (!(a.mass > 0.0)) throw ValidationError("mass must be positive" + where);
  }
}

GeneralizedPlan GeneralizedPlan::operator+(const GeneralizedPlan& o) const {
  GeneralizedPlan r = *this;
  r.atoms.insert(r.atoms.end(), o.atoms.begin(), o.atoms.end());
  return r;
}

double difference_quotient(const TestFunction& phi, const PlanAtom& atom) {
  if (atom.t == 0.0) return dot(phi.gradient(atom.base), atom.dir);
  return (phi.value(atom.base + atom.t * atom.dir) - phi.value(atom.base)) / atom.t;
}

double pair_plan(const GeneralizedPlan& sigma, const TestFunction& phi) {
  double s = 0.0;
  for (const auto& a : sigma.atoms) s += a.mass * difference_quotient(phi, a);
  return s;
}

ProjectionReport verify_projection(const GeneralizedPlan& sigma, const Distribution& f,
                                   const std::vector<TestFunction>& family, double tol) {
  if (family.empty()) throw ValidationError("verify_projection needs a nonempty family");
  ProjectionReport r;
  r.tolerance = tol;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double res = std::abs(pair_plan(sigma, family[k]) - pair(f, family[k]));
    r.residuals.push_back(res);
    if (res > r.max_residual) {
      r.max_residual = res;
      r.worst_index = k;
    }
  }
  r.pass = r.max_residual <= tol;
  r.note = "checked on " + std::to_string(family.size()) +
           " test functions; passing is necessary, not sufficient, for the projection identity";
  return r;
}

GeneralizedPlan from_plan(const Matching& gamma) {
  GeneralizedPlan sigma;
  for (const auto& e : gamma.edges) {
    const double len = distance(e.source, e.target);
    if (len == 0.0) continue;
    sigma.atoms.push_back({e.target, (e.source - e.target) * (1.0 / len), len, e.mass * len});
  }
  return sigma;
}

GeneralizedPlan from_flow(const StructuredVectorMeasure& nu) {
  if (nu.cells) throw ValidationError("from_flow: cell parts are not supported");
  GeneralizedPlan sigma;
  for (const auto& a : nu.atoms) {
    const double m = norm(a.vector);
    if (m == 0.0) throw ValidationError("from_flow: zero-vector atom at " + to_string(a.point));
    sigma.atoms.push_back({a.point, a.vector * (1.0 / m), 0.0, m});
  }
  const auto& q = gauss_legendre();
  for (const auto& g : nu.segments) {
    const double m = norm(g.density);
    if (m == 0.0) continue;
    const Vec dir = g.density * (1.0 / m);
    const double len = g.length();
    for (int k = 0; k < kQuadratureNodes; ++k) {
      sigma.atoms.push_back({g.a + q.nodes[k] * (g.b - g.a), dir, 0.0, m * q.weights[k] * len});
    }
  }
  return sigma;
}

StructuredVectorMeasure to_vector_measure(const GeneralizedPlan& sigma) {
  StructuredVectorMeasure nu;
  for (const auto& a : sigma.atoms) {
    if (a.t == 0.0) {
      nu.atoms.push_back({a.base, a.dir * a.mass});
    } else {
      nu.segments.push_back({a.base, a.base + a.t * a.dir, a.dir * (a.mass / a.t)});
    }
  }
  return nu;
}

PlanSplit split(const GeneralizedPlan& sigma) {
  PlanSplit s;
  for (const auto& a : sigma.atoms) (a.t == 0.0 ? s.zero : s.positive).atoms.push_back(a);
  return s;
}

}  // namespace kr
