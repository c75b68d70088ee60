#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wienerlab/adapted.hpp"
#include "wienerlab/errors.hpp"
#include "wienerlab/harness/instances.hpp"

using namespace wienerlab;

namespace {

ChaosPoly x(unsigned n, unsigned i) { return ChaosPoly::coordinate(n, i); }

std::vector<double> random_point(std::mt19937_64& rng, unsigned n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& e : v) e = g(rng);
  return v;
}

}  // namespace

TEST(Adapted, Filtration) {
  const Filtration f(3);
  const ChaosPoly p = x(3, 1) * x(3, 2);
  EXPECT_FALSE(f.is_measurable(p, 1));
  EXPECT_TRUE(f.is_measurable(p, 2));
  EXPECT_TRUE(f.is_measurable(ChaosPoly::constant(3, 1.0), 0));
  EXPECT_TRUE(f.condition(p, 1).is_zero());
  EXPECT_THROW(f.condition(p, 4), IndexOutOfRange);
}

TEST(Adapted, ProjectionExample) {
  // Rows (eta_1 e_1 ; eta_1 e_2) project to (0 ; eta_1 e_2).
  const unsigned n = 2;
  const OperatorField k = OperatorField::from_rows(
      {HField({x(n, 1), ChaosPoly(n)}), HField({ChaosPoly(n), x(n, 1)})});
  const WeaklyAdaptedOperator p = project_operator(k);
  EXPECT_TRUE(p.op()(0, 0).is_zero());
  EXPECT_TRUE(p.op()(0, 1).is_zero());
  EXPECT_TRUE(p.op()(1, 0).is_zero());
  EXPECT_EQ(p.op()(1, 1), x(n, 1));
}

TEST(Adapted, ProjectionIsIdempotentAndMatchesQuadrature) {
  harness::Rng rng(31);
  std::mt19937_64 pts(32);
  for (int t = 0; t < 20; ++t) {
    std::vector<ChaosPoly> coords;
    for (unsigned i = 0; i < 3; ++i) coords.push_back(harness::random_poly(rng, {3, 3, 4, 8}));
    const HField u(coords);
    const PredictableHField pu = project_adapted(u);
    EXPECT_TRUE(is_predictable(pu.field()));
    EXPECT_EQ(project_adapted(pu.field()).field(), pu.field());
    const auto pt = random_point(pts, 3);
    for (unsigned i = 0; i < 3; ++i) {
      const ChaosPoly ui = u[i];
      const double ref = oracle::expect_given(
          [&](std::span<const double> s) { return evaluate(ui, s); }, pt, i);
      EXPECT_NEAR(evaluate(pu.field()[i], pt), ref, 1e-10);
    }
  }
}

TEST(Adapted, PredictabilityChecks) {
  const unsigned n = 3;
  EXPECT_THROW(PredictableHField(HField({x(n, 1), ChaosPoly(n), ChaosPoly(n)})),
               NotPredictable);
  EXPECT_NO_THROW(PredictableHField(HField({ChaosPoly::constant(n, 1.0), x(n, 1), x(n, 2)})));
  // Constant rows are predictable; a row seeing its own coordinate is not.
  EXPECT_TRUE(is_weakly_adapted(OperatorField::identity(2)));
  const OperatorField own = OperatorField::from_rows({HField({x(2, 1), ChaosPoly(2)})});
  EXPECT_FALSE(is_weakly_adapted(own));
  EXPECT_THROW(WeaklyAdaptedOperator{own}, NotPredictable);
}

TEST(Adapted, ItoIntegralIsPathwiseDivergence) {
  harness::Rng rng(33);
  std::mt19937_64 pts(34);
  for (int t = 0; t < 30; ++t) {
    const PredictableHField u = harness::random_predictable(rng, {5, 3, 4, 8});
    const ChaosPoly du = divergence_h(u.field());
    const auto s = random_point(pts, 5);
    EXPECT_NEAR(ito_integral(u, s), evaluate(du, s), 1e-10);
  }
}

TEST(Adapted, ItoIsometry) {
  harness::Rng rng(35);
  for (int t = 0; t < 50; ++t) {
    const harness::PolyShape shape{4, 3, 4, 8};
    EXPECT_LE(check_ito_isometry(harness::random_predictable(rng, shape),
                                 harness::random_predictable(rng, shape)),
              1e-10);
  }
  // Letting coordinate i see eta_i breaks it: u = eta_1 e_1 has E(delta u)^2 = 2.
  const HField u({x(2, 1), ChaosPoly(2)});
  const ChaosPoly du = divergence_h(u);
  EXPECT_NEAR(l2_inner(du, du), 2.0, 1e-14);
  EXPECT_NEAR(field_energy(u), 1.0, 1e-14);
}

TEST(Adapted, OperatorIsometryAndWeakOrthogonality) {
  harness::Rng rng(36);
  for (int t = 0; t < 30; ++t) {
    const harness::PolyShape shape{4, 3, 3, 8};
    const auto k = harness::random_weakly_adapted(rng, 2, shape);
    const auto q = harness::random_finite_rank(rng, 2, 2, shape);
    EXPECT_LE(check_operator_isometry(k, q), 1e-10);
    EXPECT_LE(check_weak_orthogonality(harness::random_operator(rng, 2, shape), q), 1e-10);
  }
}

TEST(Adapted, FiniteRankAssembly) {
  const unsigned n = 2;
  FiniteRankOperator q(2, n);
  q.add(PredictableHField(HField({ChaosPoly(n), x(n, 1)})), {1.0, 2.0});
  const OperatorField k = q.assemble();
  EXPECT_EQ(k(1, 1), 2.0 * x(n, 1));
  EXPECT_TRUE(k(0, 0).is_zero());
  EXPECT_THROW(q.add(PredictableHField(HField::zero(3)), {1.0, 0.0}), DimensionMismatch);
}

// Dense oracle: on a basis of predictable monomial fields, the map K -> delta K
// is injective iff its matrix has full column rank.
TEST(Adapted, DivergenceFreeUniquenessOracle) {
  const unsigned n = 3;
  std::vector<HField> basis;
  for (unsigned i = 1; i <= n; ++i) {
    // coordinate i may use eta_1..eta_{i-1} up to degree 2
    std::vector<MultiIndex> monos = {MultiIndex()};
    for (unsigned j = 1; j < i; ++j) {
      const std::size_t m = monos.size();
      for (std::size_t b = 0; b < m; ++b)
        for (unsigned k = 1; k <= 2; ++k) {
          std::vector<MultiIndex::Entry> e(monos[b].entries().begin(), monos[b].entries().end());
          e.push_back({j, k});
          const MultiIndex mi = MultiIndex::from_entries(e);
          if (mi.total_degree() <= 2) monos.push_back(mi);
        }
    }
    for (const auto& mi : monos) {
      std::vector<ChaosPoly> coords(n, ChaosPoly(n));
      coords[i - 1] = ChaosPoly::monomial(n, mi);
      basis.emplace_back(coords);
    }
  }
  std::vector<ChaosPoly> images;
  std::map<MultiIndex, int> rows;
  for (const auto& u : basis) {
    images.push_back(divergence_h(u));
    for (const auto& [mi, c] : images.back().terms()) rows.emplace(mi, int(rows.size()));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(Eigen::Index(rows.size()), Eigen::Index(basis.size()));
  for (std::size_t b = 0; b < images.size(); ++b)
    for (const auto& [mi, c] : images[b].terms()) m(rows[mi], Eigen::Index(b)) = c;
  EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank(), Eigen::Index(basis.size()));

  harness::Rng rng(37);
  for (int t = 0; t < 20; ++t) {
    EXPECT_TRUE(check_divergence_free_uniqueness(harness::random_weakly_adapted(rng, 2, {3, 3, 3, 8})));
  }
}

TEST(Adapted, ExpectedTracePairing) {
  const OperatorField id = OperatorField::identity(3);
  EXPECT_DOUBLE_EQ(expected_trace_pairing(id, id), 3.0);
  EXPECT_THROW(expected_trace_pairing(id, OperatorField::identity(2)), DimensionMismatch);
}
