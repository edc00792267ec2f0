#include <doctest.h>

#include <cmath>
#include <string>

#include "kr/error.hpp"
#include "kr/instances.hpp"
#include "kr/matchnorm.hpp"
#include "oracles.hpp"

using namespace kr;

namespace {

SignedAtomMeasure reconnection() {
  return SignedAtomMeasure::dipole({0.0, 0.0}, {10.0, 0.0}) +
         SignedAtomMeasure::dipole({10.0, 1.0}, {0.0, 1.0});
}

}  // namespace

TEST_CASE("minimal connection examples") {
  const auto one = minimal_connection(SignedAtomMeasure::dipole({0.0, 0.0}, {1.0, 0.0}));
  CHECK(one.cost == 1.0);
  CHECK(one.edges.size() == 1);

  const auto re = minimal_connection(reconnection());
  CHECK(re.cost == 2.0);
  REQUIRE(re.edges.size() == 2);
  for (const auto& e : re.edges) CHECK(distance(e.source, e.target) == 1.0);

  const auto heavy = minimal_connection(SignedAtomMeasure::dipole({0.0, 0.0}, {3.0, 4.0}, 2.0));
  CHECK(heavy.cost == 10.0);
}

TEST_CASE("unbalanced measures are rejected with the total") {
  const SignedAtomMeasure f({{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, -0.5}});
  try {
    minimal_connection(f);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("0.5") != std::string::npos);
  }
}

TEST_CASE("matching equals the transport oracle with non-uniform masses") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_balanced(rng, 2 + rng() % 15, trial % 4 == 0 ? 3 : 2);
    const auto g = minimal_connection(f);
    CHECK(g.cost == doctest::Approx(oracle::transport(f)).epsilon(1e-10));
    CHECK(g.cost == matching_cost(g.edges));
    // Marginals.
    std::vector<double> out(f.size(), 0.0);
    for (const auto& e : g.edges) {
      out[e.source_index] += e.mass;
      out[e.target_index] -= e.mass;
    }
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(out[i] == doctest::Approx(f.atoms()[i].mass).epsilon(1e-12));
  }
}

TEST_CASE("matching is deterministic and tie-broken by index") {
  // Square: both perfect matchings cost 2.
  const auto f = SignedAtomMeasure::dipole({0.0, 0.0}, {1.0, 0.0}) +
                 SignedAtomMeasure::dipole({1.0, 1.0}, {0.0, 1.0});
  const auto a = minimal_connection(f);
  const auto b = minimal_connection(f);
  REQUIRE(a.edges.size() == b.edges.size());
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    CHECK(a.edges[k].source_index == b.edges[k].source_index);
    CHECK(a.edges[k].target_index == b.edges[k].target_index);
  }
  CHECK(a.cost == 2.0);
}

TEST_CASE("dual potential examples") {
  const auto d = dual_potential(SignedAtomMeasure::dipole({0.0, 0.0}, {1.0, 0.0}));
  CHECK(d.value == 1.0);
  CHECK(d.potential.values == std::vector<double>{1.0, 0.0});
  CHECK(dual_potential(reconnection()).value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("dual value is 1-homogeneous and matches the primal") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const auto f = random_balanced(rng, 2 + rng() % 12);
    const auto d = dual_potential(f);
    const double w = minimal_connection(f).cost;
    CHECK(d.value == doctest::Approx(w).epsilon(1e-9));
    CHECK(d.potential.max_violation() <= 1e-9);
    CHECK(d.potential.lip_bound <= 1.0 + 1e-9);
    const double alpha = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
    CHECK(dual_potential(f * alpha).value == doctest::Approx(alpha * d.value).epsilon(1e-9));
    double mn = 1e300;
    for (double u : d.potential.values) mn = std::min(mn, u);
    CHECK(mn == 0.0);
  }
}

TEST_CASE("brute force connection") {
  CHECK(brute_force_connection(reconnection()) == 2.0);
  CHECK(brute_force_connection(SignedAtomMeasure::dipole({0, 0}, {1, 0})) == 1.0);
  // Nested collinear dipoles: p = 0, 1, 2 and n = 5, 4, 3.
  SignedAtomMeasure nested;
  for (int k = 0; k < 3; ++k) {
    nested = nested + SignedAtomMeasure::dipole({static_cast<double>(k), 0.0}, {5.0 - k, 0.0});
  }
  CHECK(brute_force_connection(nested) == 9.0);
  CHECK(minimal_connection(nested).cost == 9.0);
  CHECK_THROWS_AS(brute_force_connection(SignedAtomMeasure::dipole({0, 0}, {1, 0}, 2.0)), ValidationError);
}

TEST_CASE("matching equals brute force exactly on unit dipoles") {
  Rng rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const auto f = random_unit_dipoles(rng, 1 + rng() % 7);
    CHECK(minimal_connection(f).cost == brute_force_connection(f));
  }
}

TEST_CASE("flat norm of dipoles in both conventions") {
  for (double d : {0.25, 0.5, 1.0, 2.0, 3.0, 4.5}) {
    const auto f = SignedAtomMeasure::dipole({0.0, 0.0}, {d, 0.0});
    CHECK(flat_norm(f, FlatConvention::kMax).value == doctest::Approx(std::min(d, 2.0)).epsilon(1e-12));
    CHECK(flat_norm(f, FlatConvention::kSum).value == doctest::Approx(2.0 * d / (d + 2.0)).epsilon(1e-12));
  }
  const SignedAtomMeasure single({{{0.3, 0.7}, 1.0}});
  CHECK(flat_norm(single, FlatConvention::kMax).value == 1.0);
  CHECK(flat_norm(single, FlatConvention::kMax).potential == std::vector<double>{1.0});
  CHECK(flat_norm(SignedAtomMeasure{}, FlatConvention::kMax).value == 0.0);
}

TEST_CASE("flat norms agree with the ground-node oracles") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    // Unbalanced measures are allowed here.
    std::vector<Atom> atoms;
    const auto n = 1 + rng() % 6;
    const Domain box{{0.0, 0.0}, {3.0, 3.0}};
    for (std::size_t k = 0; k < n; ++k) {
      atoms.push_back({random_point(rng, box), std::uniform_real_distribution<double>(-1.0, 1.0)(rng)});
    }
    const SignedAtomMeasure f(atoms);
    const double mx = flat_norm(f, FlatConvention::kMax).value;
    const double sm = flat_norm(f, FlatConvention::kSum).value;
    CHECK(mx == doctest::Approx(oracle::flat_max(f)).epsilon(1e-9));
    CHECK(sm == doctest::Approx(oracle::flat_sum(f)).epsilon(1e-7));
    CHECK(sm <= mx + 1e-12);
    CHECK(mx <= f.total_variation() + 1e-12);
    if (f.balanced()) CHECK(mx <= minimal_connection(f).cost + 1e-12);
  }
}
