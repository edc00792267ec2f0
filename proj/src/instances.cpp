#include "kr/instances.hpp"

#include <algorithm>
#include <cmath>

#include "kr/error.hpp"
#include "kr/genplan.hpp"

namespace kr {
namespace {

Domain unit_box(int dim) {
  return dim == 3 ? Domain{{0, 0, 0}, {1, 1, 1}} : Domain{{0, 0}, {1, 1}};
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

Point random_point(Rng& rng, const Domain& box) {
  Point p = Vec::zero(box.dim());
  for (int i = 0; i < box.dim(); ++i) p[i] = uniform(rng, box.lower[i], box.upper[i]);
  return p;
}

Vec random_unit(Rng& rng, int dim) {
  std::normal_distribution<double> g;
  while (true) {
    Vec v = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) v[i] = g(rng);
    const double n = norm(v);
    if (n > 1e-6) return v * (1.0 / n);
  }
}

SignedAtomMeasure random_balanced(Rng& rng, std::size_t n, int dim) {
  if (n < 2) throw ValidationError("random_balanced needs at least 2 atoms");
  const Domain box = unit_box(dim);
  const auto npos = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
  std::vector<Atom> atoms;
  double pos = 0.0, neg = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = uniform(rng, 0.1, 1.0);
    atoms.push_back({random_point(rng, box), k < npos ? m : -m});
    (k < npos ? pos : neg) += m;
  }
  for (std::size_t k = npos; k < n; ++k) atoms[k].mass *= pos / neg;
  return SignedAtomMeasure(std::move(atoms));
}

SignedAtomMeasure random_unit_dipoles(Rng& rng, std::size_t count, int dim) {
  const Domain box = unit_box(dim);
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < count; ++k) atoms.push_back({random_point(rng, box), 1.0});
  for (std::size_t k = 0; k < count; ++k) atoms.push_back({random_point(rng, box), -1.0});
  return SignedAtomMeasure(std::move(atoms));
}

CertifiedInstance random_certified(Rng& rng, std::size_t atoms, std::size_t normal_atoms) {
  const Domain far{{3.0, 0.0}, {4.0, 1.0}};
  while (true) {
    CertifiedInstance inst;
    inst.f_tangential = random_balanced(rng, atoms);
    inst.gamma = minimal_connection(inst.f_tangential);
    std::vector<Point> placed;
    while (inst.normal.atoms.size() < normal_atoms) {
      const Point z = random_point(rng, far);
      const bool apart = std::all_of(placed.begin(), placed.end(),
                                     [&](const Point& q) { return distance(q, z) > 0.1; });
      if (!apart) continue;
      placed.push_back(z);
      inst.normal.atoms.push_back({z, random_unit(rng, 2) * uniform(rng, 0.1, 2.0)});
    }
    inst.nu = to_vector_measure(from_plan(inst.gamma)) + inst.normal;
    try {
      inst.nu.validate();
    } catch (const ValidationError&) {
      continue;  // collinear overlapping rays; draw again
    }
    return inst;
  }
}

StructuredVectorMeasure tangential_cycle(Rng& rng, const Domain& box, std::size_t sides) {
  std::vector<Point> v;
  for (std::size_t k = 0; k < sides; ++k) v.push_back(random_point(rng, box));
  const double c = uniform(rng, -1.0, 1.0);
  StructuredVectorMeasure nu;
  for (std::size_t k = 0; k < sides; ++k) {
    const Point& a = v[k];
    const Point& b = v[(k + 1) % sides];
    const double len = distance(a, b);
    if (len == 0.0) continue;
    nu.segments.push_back({a, b, (b - a) * (c / len)});
  }
  return nu;
}

DipoleChain geometric_chain(std::size_t listed) {
  DipoleChain chain;
  for (std::size_t i = 1; i <= listed; ++i) {
    const Point p{0.1 + 0.8 * static_cast<double>(i - 1) / static_cast<double>(listed), 0.5};
    chain.pairs.push_back({p, p + Vec{std::ldexp(1.0, -static_cast<int>(i)), 0.0}});
  }
  chain.tail = ChainTail{0.5, 1.0};
  return chain;
}

RidgeProfile random_ridge(Rng& rng, const Domain& box) {
  RidgeProfile u;
  u.direction = random_unit(rng, box.dim());
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < box.dim(); ++i) {
    const double a = u.direction[i] * box.lower[i], b = u.direction[i] * box.upper[i];
    lo += std::min(a, b);
    hi += std::max(a, b);
  }
  const auto n = std::uniform_int_distribution<int>(2, 8)(rng);
  const double amplitude = std::pow(10.0, uniform(rng, -3.0, 1.0));
  const double width = std::pow(10.0, uniform(rng, -4.0, 0.0)) * (hi - lo);
  const double start = uniform(rng, lo - 0.1 * width, hi);
  double s = start;
  for (int k = 0; k < n; ++k) {
    u.knots.push_back(s);
    u.values.push_back(uniform(rng, -amplitude, amplitude));
    s += width * uniform(rng, 0.05, 1.0);
  }
  return u;
}

}  // namespace kr
