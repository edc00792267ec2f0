#include <doctest.h>

#include <algorithm>

#include "kr/density.hpp"
#include "kr/error.hpp"
#include "kr/genplan.hpp"
#include "kr/instances.hpp"

using namespace kr;

namespace {

const Domain kUnit{{0.0, 0.0}, {1.0, 1.0}};

Matching single_edge(Point x, Point y, double m) {
  Matching g;
  g.edges.push_back({x, y, m, 0, 1});
  g.cost = m * distance(x, y);
  return g;
}

}  // namespace

TEST_CASE("rasterised edge on a 2x1 grid") {
  const auto d = rasterize_plan(single_edge({0.0, 0.0}, {1.0, 0.0}, 2.0), make_grid(kUnit, {2, 1, 1}));
  CHECK(d.mass == std::vector<double>{1.0, 1.0});
  const auto inside = rasterize_plan(single_edge({0.1, 0.1}, {0.3, 0.2}, 3.0), make_grid(kUnit, {2, 2, 1}));
  CHECK(inside.mass[0] == doctest::Approx(3.0 * distance(Point{0.1, 0.1}, Point{0.3, 0.2})).epsilon(1e-15));
  CHECK(inside.total() == inside.mass[0]);
  CHECK(rasterize_plan(Matching{}, make_grid(kUnit, {4, 4, 1})).total() == 0.0);
}

TEST_CASE("rasterised vector measures") {
  StructuredVectorMeasure seg;
  seg.segments.push_back({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
  CHECK(rasterize_vector_measure(seg, make_grid(kUnit, {2, 1, 1})).mass == std::vector<double>{1.0, 1.0});

  StructuredVectorMeasure atom;
  atom.atoms.push_back({{0.25, 0.25}, {0.0, 3.0}});
  const auto d = rasterize_vector_measure(atom, make_grid(kUnit, {2, 2, 1}));
  CHECK(d.mass == std::vector<double>{3.0, 0.0, 0.0, 0.0});

  CHECK(rasterize_vector_measure({}, make_grid(kUnit, {3, 3, 1})).total() == 0.0);

  StructuredVectorMeasure cells;
  cells.cells = CellField{Grid{kUnit, {2, 1, 1}}, {{1.0, 0.0}, {0.0, 2.0}}};
  const auto c = rasterize_vector_measure(cells, make_grid(kUnit, {4, 2, 1}));
  CHECK(c.total() == doctest::Approx(cells.total_variation()).epsilon(1e-15));
  CHECK(c.mass[0] == doctest::Approx(0.125));
  CHECK(c.mass[3] == doctest::Approx(0.25));
}

TEST_CASE("segment clipping") {
  const Grid g = make_grid(kUnit, {4, 4, 1});
  const auto pieces = clip_segment({0.0, 0.0}, {1.0, 1.0}, g);
  REQUIRE(pieces.size() == 4);
  for (const auto& p : pieces) CHECK(p.length == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-15));
  // Along a face: the lower cell takes it.
  const auto face = clip_segment({0.0, 0.5}, {1.0, 0.5}, make_grid(kUnit, {2, 2, 1}));
  REQUIRE(face.size() == 2);
  CHECK(face[0].cell == 0);
  CHECK(face[1].cell == 1);
  CHECK_THROWS_AS(clip_segment({0.0, 0.0}, {1.5, 0.0}, g), ValidationError);
  CHECK_THROWS_AS(make_grid(kUnit, {0, 2, 1}), ValidationError);
}

TEST_CASE("clipping conserves length in 2-D and 3-D") {
  Rng rng(61);
  for (int dim : {2, 3}) {
    const Domain box = dim == 2 ? kUnit : Domain{{0, 0, 0}, {1, 1, 1}};
    for (int trial = 0; trial < 200; ++trial) {
      const auto n = 1 + static_cast<int>(rng() % 17);
      const Grid g = make_grid(box, {n, 1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 5)});
      const Point a = random_point(rng, box), b = random_point(rng, box);
      double s = 0.0;
      for (const auto& p : clip_segment(a, b, g)) {
        CHECK(p.length > 0.0);
        s += p.length;
      }
      CHECK(s == doctest::Approx(distance(a, b)).epsilon(1e-13));
    }
  }
}

TEST_CASE("density total equals transport cost") {
  Rng rng(63);
  const Grid g = make_grid(kUnit, {64, 64, 1});
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_balanced(rng, 2 + rng() % 29);
    const auto gm = minimal_connection(f);
    const auto d = rasterize_plan(gm, g);
    CHECK(std::abs(d.total() - gm.cost) <= 1e-12 * gm.cost);
    CHECK(*std::min_element(d.mass.begin(), d.mass.end()) >= 0.0);
    const auto nu = to_vector_measure(from_plan(gm));
    CHECK(std::abs(rasterize_vector_measure(nu, g).total() - gm.cost) <= 1e-12 * gm.cost);
  }
}

TEST_CASE("parallel rasterisation is bit-identical") {
  Rng rng(65);
  Matching big;
  for (int k = 0; k < 3000; ++k) {
    const Point x = random_point(rng, kUnit), y = random_point(rng, kUnit);
    big.edges.push_back({x, y, 0.5, 0, 1});
  }
  const Grid g = make_grid(kUnit, {37, 29, 1});
  const auto one = rasterize_plan(big, g, {1});
  for (unsigned t : {2u, 3u, 8u}) CHECK(rasterize_plan(big, g, {t}).mass == one.mass);
}

TEST_CASE("density export") {
  const auto d = rasterize_plan(single_edge({0.0, 0.0}, {1.0, 0.0}, 2.0), make_grid(kUnit, {2, 1, 1}));
  CHECK(export_density(d, ExportFormat::kCsv) == "0,0,1\n1,0,1\n");
  CHECK(export_density(d, ExportFormat::kAscii) == "@@\n");

  GridDensity zero{make_grid(kUnit, {3, 2, 1}), std::vector<double>(6, 0.0)};
  CHECK(export_density(zero, ExportFormat::kAscii) == "   \n   \n");

  GridDensity ramp{make_grid(kUnit, {2, 2, 1}), {0.0, 1.0, 2.0, 4.0}};
  GridDensity scaled = ramp;
  for (auto& m : scaled.mass) m *= 5.0;
  CHECK(export_density(ramp, ExportFormat::kSvg) == export_density(scaled, ExportFormat::kSvg));
  CHECK(export_density(ramp, ExportFormat::kAscii) == "+@\n :\n");

  GridDensity cube{make_grid(Domain{{0, 0, 0}, {1, 1, 1}}, {2, 1, 1}), {1.0, 0.0}};
  CHECK(export_density(cube, ExportFormat::kCsv) == "0,0,0,1\n1,0,0,0\n");
  CHECK_THROWS_AS(export_density(cube, ExportFormat::kSvg), ValidationError);
}
