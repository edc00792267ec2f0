#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kr/geometry.hpp"
#include "kr/test_function.hpp"

namespace kr {

struct Atom {
  Point point;
  double mass = 0.0;
};

/// Finite signed measure sum_i m_i delta_{x_i}. Atoms closer than 1e-9 of the
/// instance diameter are merged on construction and zero masses dropped, so
/// the atom list is a canonical form.
class SignedAtomMeasure {
 public:
  SignedAtomMeasure() = default;
  explicit SignedAtomMeasure(std::vector<Atom> atoms);

  /// delta_p - delta_n scaled by `mass`.
  static SignedAtomMeasure dipole(const Point& p, const Point& n, double mass = 1.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  int dim() const { return atoms_.empty() ? 2 : atoms_.front().point.dim; }

  double total() const;
  double total_variation() const;
  /// |total| <= 1e-9 * total_variation.
  bool balanced() const;

  /// Indices of atoms with positive (resp. negative) mass, in atom order.
  std::vector<std::size_t> positive_indices() const;
  std::vector<std::size_t> negative_indices() const;

  SignedAtomMeasure operator+(const SignedAtomMeasure& o) const;
  SignedAtomMeasure operator*(double s) const;

 private:
  std::vector<Atom> atoms_;
};

struct Dipole {
  Point p;
  Point n;
};

/// Analytic bound on the unlisted remainder: sum over unlisted pairs of
/// |p_i - n_i| <= first_term * ratio^K, K = number of listed pairs.
struct ChainTail {
  double ratio = 0.5;
  double first_term = 1.0;
};

struct DipoleChain {
  std::vector<Dipole> pairs;
  std::optional<ChainTail> tail;

  /// Bound on the part of the chain after the listed pairs.
  double unlisted_bound() const;
  /// Certified bound on sum_{i>k} |p_i - n_i| (k counts listed pairs, 0-based
  /// prefix length).
  double certified_tail(std::size_t k) const;
};

struct VectorAtom {
  Point point;
  Vec vector;
};

/// Segment a->b carrying a constant vector density per unit length.
struct VectorSegment {
  Point a;
  Point b;
  Vec density;

  double length() const { return distance(a, b); }
  Vec direction() const { return (b - a) * (1.0 / length()); }
};

/// Regular grid over a domain.
struct Grid {
  Domain domain;
  std::array<int, 3> counts{1, 1, 1};

  int dim() const { return domain.dim(); }
  std::size_t num_cells() const;
  double cell_size(int axis) const;
  double cell_volume() const;
  /// Multi-index of a linear cell index (x fastest).
  std::array<int, 3> unflatten(std::size_t idx) const;
  std::size_t flatten(const std::array<int, 3>& ijk) const;
  Point cell_center(std::size_t idx) const;
  Domain cell_box(std::size_t idx) const;
  /// Containing cell; points on an interior face go to the lower cell.
  /// Returns nullopt outside the domain.
  std::optional<std::size_t> locate(const Point& p) const;
};

/// Per-cell vector densities (w.r.t. volume) on a grid.
struct CellField {
  Grid grid;
  std::vector<Vec> vectors;
};

/// Structured vector measure nu in M(Omega, R^N): atoms, segments and an
/// optional cell part.
struct StructuredVectorMeasure {
  std::vector<VectorAtom> atoms;
  std::vector<VectorSegment> segments;
  std::optional<CellField> cells;

  bool empty() const { return atoms.empty() && segments.empty() && !cells; }
  double total_variation() const;
  /// Throws ValidationError on zero-length or overlapping segments,
  /// non-finite data or inconsistent dimensions.
  void validate() const;

  StructuredVectorMeasure operator+(const StructuredVectorMeasure& o) const;
};

/// f = measure_part - div(divergence_part), a first-order distribution.
struct Distribution {
  SignedAtomMeasure measure_part;
  StructuredVectorMeasure divergence_part;

  static Distribution of(SignedAtomMeasure m) { return {std::move(m), {}}; }
  static Distribution divergence_of(StructuredVectorMeasure nu) {
    return {{}, std::move(nu)};
  }
};

struct PairingResult {
  double value = 0.0;
  /// Set when the quadrature is not exact for the test function.
  bool quadrature_degree_exceeded = false;
};

/// <f, phi> = sum m_i phi(x_i) + int grad(phi) . d(nu).
PairingResult pair_checked(const Distribution& f, const TestFunction& phi);
double pair(const Distribution& f, const TestFunction& phi);
/// <-div nu, phi> alone.
double pair_divergence(const StructuredVectorMeasure& nu, const TestFunction& phi);

/// Relative tolerance under which a segment density counts as tangential.
inline constexpr double kParallelTolerance = 1e-12;

/// Splits `density` into the component along `dir` and the orthogonal rest;
/// densities within kParallelTolerance of `dir` are returned as exactly
/// tangential.
std::pair<Vec, Vec> tangential_normal(const Vec& density, const Vec& dir);

/// -div(nu) as an atom measure when nu is a sum of tangential segments;
/// nullopt when atoms or normal segment components make it a genuine
/// first-order distribution. Throws ValidationError if nu has cells.
std::optional<SignedAtomMeasure> divergence_as_measure(const StructuredVectorMeasure& nu);

struct TruncatedChain {
  Distribution f;
  double error_bound = 0.0;
};

/// Atom measure of the listed dipoles; the analytic tail becomes an error
/// bound on W1. Throws InfeasibleError if the bound exceeds truncation_eps.
TruncatedChain from_dipoles(const DipoleChain& chain, double truncation_eps);

/// Every point an instance touches, for domain construction.
std::vector<Point> geometry_points(const Distribution& f);

}  // namespace kr
