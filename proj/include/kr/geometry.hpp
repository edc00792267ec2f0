#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kr {

/// A point or vector of R^N with N in {2, 3}.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 2;

  Vec() = default;
  Vec(double x, double y) : c{x, y, 0.0}, dim(2) {}
  Vec(double x, double y, double z) : c{x, y, z}, dim(3) {}

  static Vec zero(int dim) {
    Vec v;
    v.dim = dim;
    return v;
  }
  static Vec axis(int dim, int i) {
    Vec v = zero(dim);
    v.c[static_cast<std::size_t>(i)] = 1.0;
    return v;
  }

  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim; ++i) c[i] *= s;
    return *this;
  }

  bool finite() const;
  bool operator==(const Vec& o) const = default;
};

using Point = Vec;

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) s += a.c[i] * b.c[i];
  return s;
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec& a, const Vec& b) { return norm(a - b); }

std::string to_string(const Vec& v);

/// Axis-aligned box Omega.
struct Domain {
  Point lower;
  Point upper;

  int dim() const { return lower.dim; }
  bool contains(const Point& p, double slack = 0.0) const;
  double diameter() const { return distance(lower, upper); }
};

/// Bounding box of `pts` padded by `pad_fraction` of the extent per side.
/// Degenerate axes are padded by the same fraction of the largest extent.
Domain bounding_domain(std::span<const Point> pts, double pad_fraction = 0.05);

/// Closest point to `x` on the segment [a, b].
Point closest_on_segment(const Point& x, const Point& a, const Point& b);

}  // namespace kr
