#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kr/matchnorm.hpp"
#include "kr/measures.hpp"
#include "kr/sharpspace.hpp"

namespace kr {

/// Seeded instance generators shared by the tests, the acceptance suite and
/// `selftest`. Everything is a pure function of the engine state.
using Rng = std::mt19937_64;

Point random_point(Rng& rng, const Domain& box);
Vec random_unit(Rng& rng, int dim);

/// Balanced measure with n atoms (2 <= n) in the unit box, masses in
/// [0.1, 1] on the positive side and rescaled to balance on the negative one.
SignedAtomMeasure random_balanced(Rng& rng, std::size_t n, int dim = 2);

/// Sum of `count` unit dipoles with endpoints in the unit box.
SignedAtomMeasure random_unit_dipoles(Rng& rng, std::size_t count, int dim = 2);

/// Tangential transport in the unit box plus vector atoms placed in
/// [3, 4] x [0, 1], away from every transport ray.
struct CertifiedInstance {
  SignedAtomMeasure f_tangential;
  Matching gamma;                   // optimal plan of f_tangential
  StructuredVectorMeasure normal;   // vector atoms only
  StructuredVectorMeasure nu;       // to_vector_measure(from_plan(gamma)) + normal
};

CertifiedInstance random_certified(Rng& rng, std::size_t atoms, std::size_t normal_atoms);

/// Closed polygon with `sides` random vertices in `box` carrying constant
/// circulation; divergence free.
StructuredVectorMeasure tangential_cycle(Rng& rng, const Domain& box, std::size_t sides);

/// p_i = (0.1 + 0.8 (i-1)/K, 0.5), n_i = p_i + (2^-i, 0) for i = 1..K, with
/// the analytic tail sum_{i>K} 2^-i = 2^-K.
DipoleChain geometric_chain(std::size_t listed);

/// Random piecewise affine ridge profile; amplitudes and slopes vary over
/// several orders of magnitude.
RidgeProfile random_ridge(Rng& rng, const Domain& box);

}  // namespace kr
