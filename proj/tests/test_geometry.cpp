#include <doctest.h>

#include <cmath>
#include <vector>

#include "kr/format.hpp"
#include "kr/geometry.hpp"
#include "kr/quadrature.hpp"

using namespace kr;

TEST_CASE("vector arithmetic keeps the dimension") {
  const Vec a{1.0, 2.0}, b{3.0, -1.0};
  CHECK((a + b) == Vec{4.0, 1.0});
  CHECK((a - b) == Vec{-2.0, 3.0});
  CHECK(dot(a, b) == 1.0);
  CHECK(norm(Vec{3.0, 4.0}) == 5.0);
  CHECK(distance(Vec{0, 0, 0}, Vec{1, 2, 2}) == 3.0);
  CHECK(Vec::axis(3, 2) == Vec{0.0, 0.0, 1.0});
  CHECK_FALSE(Vec(1.0, NAN).finite());
}

TEST_CASE("bounding domain pads by 5% and handles degenerate axes") {
  const std::vector<Point> pts{{0.0, 0.0}, {2.0, 0.0}};
  const Domain d = bounding_domain(pts);
  CHECK(d.lower[0] == doctest::Approx(-0.1));
  CHECK(d.upper[0] == doctest::Approx(2.1));
  CHECK(d.upper[1] - d.lower[1] > 0.0);
  for (const auto& p : pts) CHECK(d.contains(p));
  const Domain empty = bounding_domain(std::vector<Point>{});
  CHECK(empty.dim() == 2);
  CHECK(empty.diameter() > 0.0);
}

TEST_CASE("closest point on a segment") {
  const Point a{0.0, 0.0}, b{2.0, 0.0};
  CHECK(closest_on_segment({1.0, 5.0}, a, b) == Point{1.0, 0.0});
  CHECK(closest_on_segment({-3.0, 1.0}, a, b) == a);
  CHECK(closest_on_segment({9.0, -1.0}, a, b) == b);
  CHECK(closest_on_segment({4.0, 4.0}, a, a) == a);
}

TEST_CASE("Gauss-Legendre rule is exact to degree 15 and not beyond") {
  const auto& q = gauss_legendre();
  double wsum = 0.0;
  for (double w : q.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-15));
  for (int k = 0; k <= kQuadratureExactDegree; ++k) {
    double s = 0.0;
    for (int i = 0; i < kQuadratureNodes; ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
    CHECK(std::abs(s - 1.0 / (k + 1)) < 1e-14);
  }
  double s = 0.0;
  for (int i = 0; i < kQuadratureNodes; ++i) s += q.weights[i] * std::pow(q.nodes[i], 16);
  CHECK(std::abs(s - 1.0 / 17) > 1e-12);
}

TEST_CASE("doubles format as shortest round-trip decimals") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  const double x = std::sqrt(2.0);
  CHECK(std::stod(format_double(x)) == x);
}
