#include "kr/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "kr/error.hpp"
#include "kr/format.hpp"

namespace kr {

bool Vec::finite() const {
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(c[i])) return false;
  }
  return true;
}

std::string to_string(const Vec& v) {
  std::string s = "(";
  for (int i = 0; i < v.dim; ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + ")";
}

bool Domain::contains(const Point& p, double slack) const {
  for (int i = 0; i < dim(); ++i) {
    if (p[i] < lower[i] - slack || p[i] > upper[i] + slack) return false;
  }
  return true;
}

Domain bounding_domain(std::span<const Point> pts, double pad_fraction) {
  if (pts.empty()) return Domain{Point(0.0, 0.0), Point(1.0, 1.0)};
  const int dim = pts.front().dim;
  Point lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    if (p.dim != dim) throw ValidationError("mixed point dimensions");
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  double largest = 0.0;
  for (int i = 0; i < dim; ++i) largest = std::max(largest, hi[i] - lo[i]);
  if (largest == 0.0) largest = 1.0;
  for (int i = 0; i < dim; ++i) {
    const double extent = hi[i] - lo[i];
    const double pad = pad_fraction * (extent > 0.0 ? extent : largest);
    lo[i] -= pad;
    hi[i] += pad;
  }
  return Domain{lo, hi};
}

Point closest_on_segment(const Point& x, const Point& a, const Point& b) {
  const Vec ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  const double t = std::clamp(dot(x - a, ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace kr
