#include "kr/sharpspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kr/beckmann.hpp"
#include "kr/error.hpp"
#include "kr/format.hpp"

namespace kr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A normal element: an atom (a == b) or a segment, with unit normal n.
struct NormalElement {
  Point a;
  Point b;
  Vec n;
};

double segment_distance_sampled(const NormalElement& e, const NormalElement& o) {
  double d = kInf;
  constexpr int kSamples = 16;
  for (int s = 0; s <= kSamples; ++s) {
    const Point p = e.a + (static_cast<double>(s) / kSamples) * (e.b - e.a);
    d = std::min(d, distance(p, closest_on_segment(p, o.a, o.b)));
  }
  return d;
}

std::vector<Point> check_points(const NormalElement& e, double spacing) {
  const double len = distance(e.a, e.b);
  if (len == 0.0) return {e.a};
  const auto n = static_cast<int>(std::min(20000.0, std::ceil(len / spacing)));
  std::vector<Point> pts;
  for (int s = 0; s <= n; ++s) pts.push_back(e.a + (static_cast<double>(s) / n) * (e.b - e.a));
  return pts;
}

}  // namespace

TangentialSplit tangential_split(const StructuredVectorMeasure& nu) {
  TangentialSplit s;
  for (const auto& a : nu.atoms) {
    s.normal.atoms.push_back(a);
    s.normal_mass += norm(a.vector);
  }
  for (const auto& g : nu.segments) {
    const auto [tan, nor] = tangential_normal(g.density, g.direction());
    if (norm(tan) > 0.0) s.tangential.segments.push_back({g.a, g.b, tan});
    const double nn = norm(nor);
    if (nn > 0.0) {
      s.normal.segments.push_back({g.a, g.b, nor});
      s.normal_mass += nn * g.length();
    }
  }
  s.tangential.cells = nu.cells;
  return s;
}

double distance_to_sharp(const StructuredVectorMeasure& nu) {
  return tangential_split(nu).normal_mass;
}

DualWitness build_dual_witness(const std::vector<Point>& support,
                               const std::vector<double>& potential,
                               const StructuredVectorMeasure& normal, double max_radius) {
  if (support.size() != potential.size()) {
    throw ValidationError("witness: support and potential sizes differ");
  }
  int dim = 2;
  std::vector<EnvelopePiece> pieces;
  for (std::size_t j = 0; j < support.size(); ++j) {
    pieces.push_back({potential[j], support[j], support[j]});
    dim = support[j].dim;
  }
  std::vector<NormalElement> elems;
  for (const auto& a : normal.atoms) {
    const double m = norm(a.vector);
    if (m > 0.0) elems.push_back({a.point, a.point, a.vector * (1.0 / m)});
    dim = a.point.dim;
  }
  for (const auto& g : normal.segments) {
    const auto [tan, nor] = tangential_normal(g.density, g.direction());
    const double m = norm(nor);
    if (m > 0.0) elems.push_back({g.a, g.b, nor * (1.0 / m)});
    dim = g.a.dim;
  }

  // Upper and lower cones of the potential: every 1-Lipschitz extension lies
  // between them.
  auto upper_cone = [&](const Point& p) {
    double v = kInf;
    for (std::size_t j = 0; j < support.size(); ++j) v = std::min(v, potential[j] + distance(p, support[j]));
    return v;
  };
  auto lower_cone = [&](const Point& p) {
    double v = -kInf;
    for (std::size_t j = 0; j < support.size(); ++j) v = std::max(v, potential[j] - distance(p, support[j]));
    return v;
  };

  // Per element: the value phi takes on it (midway between the cones) and
  // the largest admissible radius.
  std::vector<double> level(elems.size(), 0.0), base_radius(elems.size(), max_radius);
  DualWitness w{TestFunction::constant(dim, 0.0), kInf, false};
  for (std::size_t k = 0; k < elems.size(); ++k) {
    double hi = kInf, lo = -kInf;
    for (const auto& p : check_points(elems[k], distance(elems[k].a, elems[k].b) / 16.0 + 1e-300)) {
      hi = std::min(hi, upper_cone(p));
      lo = std::max(lo, lower_cone(p));
    }
    if (!support.empty()) {
      if (!(hi > lo)) return w;
      level[k] = 0.5 * (hi + lo);
      base_radius[k] = std::min(base_radius[k], (hi - lo) / 4.0);
    }
    for (std::size_t l = 0; l < elems.size(); ++l) {
      if (l != k) base_radius[k] = std::min(base_radius[k], segment_distance_sampled(elems[k], elems[l]) / 4.0);
    }
    if (!(base_radius[k] > 0.0)) return w;
  }

  // Shrinking the radii only helps; retry with halved radii until each
  // element's own piece is the strict minimum along it.
  constexpr int kAttempts = 24;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const double shrink = std::ldexp(1.0, -attempt);
    std::vector<EnvelopePiece> all = pieces;
    std::vector<double> radius(elems.size());
    for (std::size_t k = 0; k < elems.size(); ++k) {
      const double r = base_radius[k] * shrink;
      radius[k] = r;
      const Point a = elems[k].a - r * elems[k].n;
      const Point b = elems[k].b - r * elems[k].n;
      double offset = level[k] - r;
      for (std::size_t j = 0; j < support.size(); ++j) {
        offset = std::max(offset, potential[j] - distance(support[j], closest_on_segment(support[j], a, b)));
      }
      all.push_back({offset, a, b});
    }
    if (all.empty()) return {TestFunction::constant(dim, 0.0), kInf, true};

    // Between check points spaced h apart the gap can shrink by at most h.
    const std::size_t first_normal = support.size();
    double min_margin = kInf;
    for (std::size_t k = 0; k < elems.size(); ++k) {
      const auto pts = check_points(elems[k], radius[k] / 4.0);
      const double h = pts.size() > 1 ? distance(pts[0], pts[1]) : 0.0;
      const auto& own = all[first_normal + k];
      for (const auto& p : pts) {
        const double mine = own.offset + distance(p, closest_on_segment(p, own.a, own.b));
        double others = kInf;
        for (std::size_t q = 0; q < all.size(); ++q) {
          if (q == first_normal + k) continue;
          const auto& pc = all[q];
          others = std::min(others, pc.offset + distance(p, closest_on_segment(p, pc.a, pc.b)));
        }
        min_margin = std::min(min_margin, others - mine - h);
      }
    }
    w = {TestFunction::envelope(dim, std::move(all)), min_margin, min_margin > 0.0};
    if (w.valid) break;
  }
  return w;
}

Decomposition decompose(const StructuredVectorMeasure& nu, double tol_abs, double tol_rel) {
  const auto s = tangential_split(nu);
  Decomposition d;
  d.normal_mass = s.normal_mass;
  d.f_normal = Distribution::divergence_of(s.normal);
  if (s.tangential.cells) {
    d.f_tangential = Distribution::divergence_of(s.tangential);
    return d;
  }
  const auto m = divergence_as_measure(s.tangential);
  if (!m) {
    d.f_tangential = Distribution::divergence_of(s.tangential);
    return d;
  }
  d.f_tangential = Distribution::of(*m);

  const auto net = complete_network(*m);
  const auto flow = solve_beckmann(net);
  d.w1_tangential = flow.cost;
  d.w1_total = flow.cost + s.normal_mass;

  auto pts = geometry_points(Distribution{*m, s.normal});
  const double scale = pts.empty() ? 1.0 : bounding_domain(pts, 0.0).diameter();
  const auto witness =
      build_dual_witness(net.nodes, flow.potential, s.normal, 0.05 * (scale > 0.0 ? scale : 1.0));
  const Distribution f{*m, s.normal};
  d.witness_value = pair(f, witness.phi);
  const double upper = *d.w1_total;
  d.certified = witness.valid && *d.witness_value >= upper - tol_abs - tol_rel * upper;
  return d;
}

double sigma_zero_distance(const Matching& gamma_plus, const StructuredVectorMeasure& normal_part) {
  const GeneralizedPlan sigma = from_plan(gamma_plus) + from_flow(normal_part);
  return split(sigma).zero.total_variation();
}

ModulusCurve modulus(const DipoleChain& chain, const std::vector<double>& eps_list) {
  ModulusCurve curve;
  const double floor = chain.unlisted_bound();
  for (double eps : eps_list) {
    if (!(eps >= 0.0)) throw ValidationError("modulus: eps must be nonnegative");
    if (eps < floor) {
      throw InfeasibleError("modulus: eps " + format_double(eps) +
                            " is below the certifiable floor " + format_double(floor) +
                            " (list more pairs or use eps >= floor)");
    }
    std::size_t k = 0;
    while (chain.certified_tail(k) > eps) ++k;
    curve.samples.push_back({eps, 2.0 * static_cast<double>(k), k, chain.certified_tail(k)});
  }
  return curve;
}

double RidgeProfile::value(const Point& x) const {
  const double s = dot(direction, x);
  if (s <= knots.front()) return values.front();
  if (s >= knots.back()) return values.back();
  const auto it = std::upper_bound(knots.begin(), knots.end(), s);
  const auto k = static_cast<std::size_t>(it - knots.begin()) - 1;
  const double t = (s - knots[k]) / (knots[k + 1] - knots[k]);
  return values[k] + t * (values[k + 1] - values[k]);
}

double RidgeProfile::lipschitz() const {
  double lip = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    lip = std::max(lip, std::abs(values[k + 1] - values[k]) / (knots[k + 1] - knots[k]));
  }
  return lip;
}

double RidgeProfile::sup_norm(const Domain& box) const {
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < box.dim(); ++i) {
    const double a = direction[i] * box.lower[i], b = direction[i] * box.upper[i];
    lo += std::min(a, b);
    hi += std::max(a, b);
  }
  auto h = [&](double s) {
    Point p = Vec::zero(direction.dim);
    p = direction * s;
    return std::abs(value(p));
  };
  double sup = std::max(h(lo), h(hi));
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (knots[k] > lo && knots[k] < hi) sup = std::max(sup, std::abs(values[k]));
  }
  return sup;
}

double modulus_slack(const DipoleChain& chain, const ModulusSample& sample,
                     const std::vector<RidgeProfile>& profiles, const Domain& box) {
  double worst = kInf;
  for (const auto& u : profiles) {
    double listed = 0.0;
    for (const auto& d : chain.pairs) listed += u.value(d.p) - u.value(d.n);
    const double lip = u.lipschitz();
    const double lhs = std::abs(listed) + lip * chain.unlisted_bound();
    const double rhs = sample.c_eps * u.sup_norm(box) + sample.eps * lip;
    worst = std::min(worst, rhs - lhs);
  }
  return worst;
}

}  // namespace kr
