#pragma once

// Seeded random instances for the property suites and acceptance runs.

#include <random>
#include <vector>

#include "wienerlab/adapted.hpp"

namespace wienerlab::harness {

using Rng = std::mt19937_64;

struct PolyShape {
  unsigned n = 4;
  unsigned max_degree = 4;
  unsigned max_terms = 6;
  unsigned degree_cap = kDefaultDegreeCap;
};

/// Uniform [-1, 1) coefficients on random monomials over coordinates 1..n.
ChaosPoly random_poly(Rng& rng, const PolyShape& shape);
/// Same, restricted to coordinates below `bound` (a constant when bound <= 1).
ChaosPoly random_past_poly(Rng& rng, const PolyShape& shape, unsigned bound);
ChaosPoly random_centered_poly(Rng& rng, const PolyShape& shape);
/// A constant plus a nonzero first-chaos part.
ChaosPoly random_first_chaos(Rng& rng, unsigned n, unsigned degree_cap = kDefaultDegreeCap);

VField random_vfield(Rng& rng, unsigned d, const PolyShape& shape);
OperatorField random_operator(Rng& rng, unsigned d, const PolyShape& shape);
PredictableHField random_predictable(Rng& rng, const PolyShape& shape);
WeaklyAdaptedOperator random_weakly_adapted(Rng& rng, unsigned d, const PolyShape& shape);
FiniteRankOperator random_finite_rank(Rng& rng, unsigned d, unsigned rank,
                                      const PolyShape& shape);
/// Row-major skew-symmetric n x n matrix.
std::vector<double> random_skew(Rng& rng, unsigned n);
/// Row-major orthonormal basis of R^n (rows).
std::vector<double> random_onb(Rng& rng, unsigned n);

/// v = c + delta(K) for a random weakly adapted K of entry degree
/// <= shape.max_degree - 1. The generating integrand is returned alongside.
struct RepresentableInstance {
  VField v;
  WeaklyAdaptedOperator integrand;
};
RepresentableInstance random_representable(Rng& rng, unsigned d, const PolyShape& shape);

unsigned uniform_int(Rng& rng, unsigned lo, unsigned hi);

}  // namespace wienerlab::harness
