#include "kr/measures.hpp"

#include <algorithm>
#include <cmath>

#include "kr/error.hpp"
#include "kr/format.hpp"
#include "kr/quadrature.hpp"

namespace kr {

// ---------------------------------------------------------------------------
// SignedAtomMeasure

SignedAtomMeasure::SignedAtomMeasure(std::vector<Atom> atoms) {
  if (atoms.empty()) return;
  const int dim = atoms.front().point.dim;
  std::vector<Point> pts;
  pts.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (a.point.dim != dim) throw ValidationError("atoms of mixed dimension");
    if (!a.point.finite() || !std::isfinite(a.mass)) {
      throw ValidationError("non-finite atom " + to_string(a.point));
    }
    pts.push_back(a.point);
  }
  const Domain box = bounding_domain(pts, 0.0);
  const double diam = box.diameter();
  const double tol = 1e-9 * (diam > 0.0 ? diam : 1.0);

  double scale = 0.0;
  for (const auto& a : atoms) {
    auto it = std::find_if(atoms_.begin(), atoms_.end(), [&](const Atom& b) {
      return distance(a.point, b.point) <= tol;
    });
    if (it == atoms_.end()) {
      atoms_.push_back(a);
    } else {
      it->mass += a.mass;
    }
    scale += std::abs(a.mass);
  }
  std::erase_if(atoms_, [&](const Atom& a) {
    return a.mass == 0.0 || std::abs(a.mass) <= 1e-15 * scale;
  });
}

SignedAtomMeasure SignedAtomMeasure::dipole(const Point& p, const Point& n, double mass) {
  return SignedAtomMeasure({{p, mass}, {n, -mass}});
}

double SignedAtomMeasure::total() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

double SignedAtomMeasure::total_variation() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += std::abs(a.mass);
  return s;
}

bool SignedAtomMeasure::balanced() const {
  return std::abs(total()) <= 1e-9 * total_variation();
}

std::vector<std::size_t> SignedAtomMeasure::positive_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].mass > 0.0) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> SignedAtomMeasure::negative_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].mass < 0.0) out.push_back(i);
  }
  return out;
}

SignedAtomMeasure SignedAtomMeasure::operator+(const SignedAtomMeasure& o) const {
  std::vector<Atom> all = atoms_;
  all.insert(all.end(), o.atoms_.begin(), o.atoms_.end());
  return SignedAtomMeasure(std::move(all));
}

SignedAtomMeasure SignedAtomMeasure::operator*(double s) const {
  std::vector<Atom> scaled = atoms_;
  for (auto& a : scaled) a.mass *= s;
  return SignedAtomMeasure(std::move(scaled));
}

// ---------------------------------------------------------------------------
// DipoleChain

double DipoleChain::unlisted_bound() const {
  if (!tail) return 0.0;
  return tail->first_term * std::pow(tail->ratio, static_cast<double>(pairs.size()));
}

double DipoleChain::certified_tail(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = k; i < pairs.size(); ++i) s += distance(pairs[i].p, pairs[i].n);
  return s + unlisted_bound();
}

// ---------------------------------------------------------------------------
// Grid

std::size_t Grid::num_cells() const {
  std::size_t n = 1;
  for (int i = 0; i < dim(); ++i) n *= static_cast<std::size_t>(counts[i]);
  return n;
}

double Grid::cell_size(int axis) const {
  return (domain.upper[axis] - domain.lower[axis]) / counts[static_cast<std::size_t>(axis)];
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= cell_size(i);
  return v;
}

std::array<int, 3> Grid::unflatten(std::size_t idx) const {
  std::array<int, 3> ijk{0, 0, 0};
  for (int i = 0; i < dim(); ++i) {
    const auto n = static_cast<std::size_t>(counts[i]);
    ijk[i] = static_cast<int>(idx % n);
    idx /= n;
  }
  return ijk;
}

std::size_t Grid::flatten(const std::array<int, 3>& ijk) const {
  std::size_t idx = 0;
  for (int i = dim() - 1; i >= 0; --i) {
    idx = idx * static_cast<std::size_t>(counts[i]) + static_cast<std::size_t>(ijk[i]);
  }
  return idx;
}

Point Grid::cell_center(std::size_t idx) const {
  const auto ijk = unflatten(idx);
  Point p = Vec::zero(dim());
  for (int i = 0; i < dim(); ++i) {
    p[i] = domain.lower[i] + (ijk[i] + 0.5) * cell_size(i);
  }
  return p;
}

Domain Grid::cell_box(std::size_t idx) const {
  const auto ijk = unflatten(idx);
  Domain box{Vec::zero(dim()), Vec::zero(dim())};
  for (int i = 0; i < dim(); ++i) {
    box.lower[i] = domain.lower[i] + ijk[i] * cell_size(i);
    box.upper[i] = ijk[i] + 1 == counts[i] ? domain.upper[i]
                                           : domain.lower[i] + (ijk[i] + 1) * cell_size(i);
  }
  return box;
}

std::optional<std::size_t> Grid::locate(const Point& p) const {
  if (!domain.contains(p)) return std::nullopt;
  std::array<int, 3> ijk{0, 0, 0};
  for (int i = 0; i < dim(); ++i) {
    const double s = (p[i] - domain.lower[i]) / cell_size(i);
    const double fl = std::floor(s);
    int k = static_cast<int>(fl);
    if (fl == s && k > 0) --k;  // on an interior face: lower cell
    ijk[i] = std::clamp(k, 0, counts[i] - 1);
  }
  return flatten(ijk);
}

// ---------------------------------------------------------------------------
// StructuredVectorMeasure

double StructuredVectorMeasure::total_variation() const {
  double s = 0.0;
  for (const auto& a : atoms) s += norm(a.vector);
  for (const auto& g : segments) s += norm(g.density) * g.length();
  if (cells) {
    const double vol = cells->grid.cell_volume();
    for (const auto& v : cells->vectors) s += norm(v) * vol;
  }
  return s;
}

void StructuredVectorMeasure::validate() const {
  int dim = -1;
  auto check_dim = [&](const Vec& v, const char* what) {
    if (dim < 0) dim = v.dim;
    if (v.dim != dim) throw ValidationError(std::string("mixed dimensions in ") + what);
    if (!v.finite()) throw ValidationError(std::string("non-finite value in ") + what);
  };
  for (const auto& a : atoms) {
    check_dim(a.point, "vector atom");
    check_dim(a.vector, "vector atom");
  }
  double max_len = 0.0;
  for (const auto& g : segments) {
    check_dim(g.a, "segment");
    check_dim(g.b, "segment");
    check_dim(g.density, "segment");
    if (!(g.length() > 0.0)) {
      throw ValidationError("zero-length segment at " + to_string(g.a));
    }
    max_len = std::max(max_len, g.length());
  }
  const double tol = 1e-9 * max_len;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const Vec u = s.direction();
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      const auto& t = segments[j];
      const Vec da = t.a - s.a, db = t.b - s.a;
      const double pa = dot(da, u), pb = dot(db, u);
      if (norm(da - pa * u) > tol || norm(db - pb * u) > tol) continue;
      const double lo = std::max(0.0, std::min(pa, pb));
      const double hi = std::min(s.length(), std::max(pa, pb));
      if (hi - lo > tol) {
        throw ValidationError("overlapping segments " + std::to_string(i) + " and " +
                              std::to_string(j));
      }
    }
  }
  if (cells) {
    if (dim >= 0 && cells->grid.dim() != dim) throw ValidationError("cell grid dimension");
    if (cells->vectors.size() != cells->grid.num_cells()) {
      throw ValidationError("cell vector count does not match the grid");
    }
    for (const auto& v : cells->vectors) check_dim(v, "cells");
  }
}

StructuredVectorMeasure StructuredVectorMeasure::operator+(
    const StructuredVectorMeasure& o) const {
  StructuredVectorMeasure r = *this;
  r.atoms.insert(r.atoms.end(), o.atoms.begin(), o.atoms.end());
  r.segments.insert(r.segments.end(), o.segments.begin(), o.segments.end());
  if (o.cells) {
    if (!r.cells) {
      r.cells = o.cells;
    } else {
      if (r.cells->grid.counts != o.cells->grid.counts ||
          r.cells->grid.domain.lower != o.cells->grid.domain.lower ||
          r.cells->grid.domain.upper != o.cells->grid.domain.upper) {
        throw ValidationError("cannot add cell fields on different grids");
      }
      for (std::size_t i = 0; i < r.cells->vectors.size(); ++i) {
        r.cells->vectors[i] += o.cells->vectors[i];
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Pairing

namespace {

double segment_pairing(const VectorSegment& g, const TestFunction& phi) {
  const auto& q = gauss_legendre();
  const Vec ab = g.b - g.a;
  const double len = norm(ab);
  double s = 0.0;
  for (int k = 0; k < kQuadratureNodes; ++k) {
    const Point x = g.a + q.nodes[k] * ab;
    s += q.weights[k] * dot(phi.gradient(x), g.density);
  }
  return s * len;
}

Vec cell_gradient_average(const Domain& box, const TestFunction& phi) {
  const auto& q = gauss_legendre();
  const int dim = box.dim();
  Vec avg = Vec::zero(dim);
  const int nz = dim == 3 ? kQuadratureNodes : 1;
  for (int i = 0; i < kQuadratureNodes; ++i) {
    for (int j = 0; j < kQuadratureNodes; ++j) {
      for (int k = 0; k < nz; ++k) {
        Point x = box.lower;
        x[0] += q.nodes[i] * (box.upper[0] - box.lower[0]);
        x[1] += q.nodes[j] * (box.upper[1] - box.lower[1]);
        double w = q.weights[i] * q.weights[j];
        if (dim == 3) {
          x[2] += q.nodes[k] * (box.upper[2] - box.lower[2]);
          w *= q.weights[k];
        }
        avg += phi.gradient(x) * w;
      }
    }
  }
  return avg;
}

}  // namespace

double pair_divergence(const StructuredVectorMeasure& nu, const TestFunction& phi) {
  double s = 0.0;
  for (const auto& a : nu.atoms) s += dot(a.vector, phi.gradient(a.point));
  for (const auto& g : nu.segments) s += segment_pairing(g, phi);
  if (nu.cells) {
    const auto& grid = nu.cells->grid;
    const double vol = grid.cell_volume();
    for (std::size_t c = 0; c < grid.num_cells(); ++c) {
      const Vec& v = nu.cells->vectors[c];
      if (norm(v) == 0.0) continue;
      s += dot(v, cell_gradient_average(grid.cell_box(c), phi)) * vol;
    }
  }
  return s;
}

PairingResult pair_checked(const Distribution& f, const TestFunction& phi) {
  PairingResult r;
  for (const auto& a : f.measure_part.atoms()) r.value += a.mass * phi.value(a.point);
  r.value += pair_divergence(f.divergence_part, phi);
  const bool needs_quadrature =
      !f.divergence_part.segments.empty() || f.divergence_part.cells.has_value();
  if (const auto deg = phi.polynomial_degree()) {
    r.quadrature_degree_exceeded = needs_quadrature && *deg - 1 > kQuadratureExactDegree;
  }
  return r;
}

double pair(const Distribution& f, const TestFunction& phi) {
  return pair_checked(f, phi).value;
}

std::pair<Vec, Vec> tangential_normal(const Vec& density, const Vec& dir) {
  const Vec tangential = dot(density, dir) * dir;
  Vec normal = density - tangential;
  if (norm(normal) <= kParallelTolerance * norm(density)) {
    return {density, Vec::zero(density.dim)};
  }
  return {tangential, normal};
}

std::optional<SignedAtomMeasure> divergence_as_measure(const StructuredVectorMeasure& nu) {
  if (nu.cells) throw ValidationError("divergence_as_measure: cell parts are not supported");
  for (const auto& a : nu.atoms) {
    if (norm(a.vector) > 0.0) return std::nullopt;
  }
  std::vector<Atom> atoms;
  atoms.reserve(2 * nu.segments.size());
  for (const auto& g : nu.segments) {
    const Vec u = g.direction();
    const auto [tan, nor] = tangential_normal(g.density, u);
    if (norm(nor) > 0.0) return std::nullopt;
    // <-div nu, phi> = theta (phi(b) - phi(a)).
    const double theta = dot(g.density, u);
    atoms.push_back({g.b, theta});
    atoms.push_back({g.a, -theta});
  }
  return SignedAtomMeasure(std::move(atoms));
}

TruncatedChain from_dipoles(const DipoleChain& chain, double truncation_eps) {
  TruncatedChain out;
  out.error_bound = chain.unlisted_bound();
  if (chain.tail) {
    if (!(truncation_eps > 0.0)) {
      throw ValidationError("a chain with an analytic tail needs truncation_eps > 0");
    }
    if (!(chain.tail->ratio > 0.0 && chain.tail->ratio < 1.0) ||
        !(chain.tail->first_term > 0.0)) {
      throw ValidationError("tail needs ratio in (0,1) and first_term > 0");
    }
    if (out.error_bound > truncation_eps) {
      throw InfeasibleError("tail bound " + format_double(out.error_bound) +
                            " exceeds truncation_eps " + format_double(truncation_eps) +
                            " with the listed pairs");
    }
  }
  std::vector<Atom> atoms;
  atoms.reserve(2 * chain.pairs.size());
  for (const auto& d : chain.pairs) {
    atoms.push_back({d.p, 1.0});
    atoms.push_back({d.n, -1.0});
  }
  out.f = Distribution::of(SignedAtomMeasure(std::move(atoms)));
  return out;
}

std::vector<Point> geometry_points(const Distribution& f) {
  std::vector<Point> pts;
  for (const auto& a : f.measure_part.atoms()) pts.push_back(a.point);
  for (const auto& a : f.divergence_part.atoms) pts.push_back(a.point);
  for (const auto& g : f.divergence_part.segments) {
    pts.push_back(g.a);
    pts.push_back(g.b);
  }
  if (f.divergence_part.cells) {
    pts.push_back(f.divergence_part.cells->grid.domain.lower);
    pts.push_back(f.divergence_part.cells->grid.domain.upper);
  }
  return pts;
}

}  // namespace kr
