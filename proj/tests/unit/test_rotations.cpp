#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>
#include <json.hpp>

#include "wienerlab/errors.hpp"
#include "wienerlab/harness/instances.hpp"
#include "wienerlab/rotations.hpp"
#include "wienerlab/statistics.hpp"

using namespace wienerlab;

namespace {

AdaptedIsometry build(unsigned n, const char* spec, std::uint64_t seed = 7) {
  return build_sequential_isometry(n, seed, parse_angle_spec(spec));
}

std::vector<double> unit(unsigned n, unsigned i) {
  std::vector<double> e(n, 0.0);
  e[i] = 1.0;
  return e;
}

const BatteryTest& find(const RotationReport& r, const std::string& name) {
  for (const auto& t : r.tests)
    if (t.name == name) return t;
  throw std::runtime_error("no test " + name);
}

}  // namespace

TEST(Rotations, AngleSpecParsing) {
  EXPECT_EQ(parse_angle_spec("zero").kind, RotationKind::kIdentity);
  EXPECT_EQ(parse_angle_spec("givens:0.5").amplitude, 0.5);
  EXPECT_EQ(parse_angle_spec("scaled:3").defect_column, 3u);
  EXPECT_EQ(to_string(parse_angle_spec("givens:0.25")), "givens:0.25");
  for (const char* bad : {"", "spin", "givens:x", "scaled:0", "sign:2"}) {
    EXPECT_THROW(parse_angle_spec(bad), PreconditionError) << bad;
  }
  EXPECT_THROW(build(0, "identity"), PreconditionError);
  EXPECT_THROW(build(3, "correlated:4"), PreconditionError);
  EXPECT_THROW(build(1, "surrogate"), PreconditionError);
  AngleSpec degenerate = parse_angle_spec("givens");
  degenerate.first_vector = {0.0, 0.0, 0.0};
  EXPECT_THROW(build_sequential_isometry(3, 1, degenerate), PreconditionError);
}

TEST(Rotations, ApplyExamples) {
  const std::vector<double> s = {0.3, -1.1, 2.0};
  EXPECT_EQ(apply_rotation(build(3, "identity"), s), s);

  const std::vector<double> ab = {-0.7, 1.3};
  const auto t = apply_rotation(build(2, "sign"), ab);
  EXPECT_EQ(t[0], -0.7);
  EXPECT_EQ(t[1], -1.3);

  const Eigen::MatrixXd q = random_orthogonal(3, 7);
  const auto tq = apply_rotation(build(3, "constant", 7), s);
  const Eigen::Vector3d ref = q.transpose() * Eigen::Vector3d(s[0], s[1], s[2]);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(tq[i], ref(i), 1e-14);
  EXPECT_LE((q.transpose() * q - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-14);
  EXPECT_THROW(apply_rotation(build(3, "identity"), ab), DimensionMismatch);
}

TEST(Rotations, ConstructionsAreIsometricAndPredictable) {
  const SampleBatch samples = sample_batch(6, 1000, 3);
  for (const char* spec : {"identity", "sign", "constant", "givens", "givens:3"}) {
    const AdaptedIsometry r = build(6, spec);
    EXPECT_LE(isometry_check(r, samples), 1e-9) << spec;
    EXPECT_TRUE(check_predictability_pathwise(r, samples)) << spec;
  }
  AngleSpec first = parse_angle_spec("givens");
  first.first_vector = {1.0, 2.0, 0.0, -1.0, 0.5, 0.0};
  const AdaptedIsometry r = build_sequential_isometry(6, 3, first);
  EXPECT_LE(isometry_check(r, samples), 1e-9);
  // Row 1 (coordinate 1 of every field) is the normalized deterministic vector.
  const Eigen::MatrixXd m = r.matrix(samples.row(0));
  const double norm = std::sqrt(1.0 + 4.0 + 1.0 + 0.25);
  for (int j = 0; j < 6; ++j) EXPECT_NEAR(m(0, j), first.first_vector[j] / norm, 1e-12);

  EXPECT_NEAR(isometry_check(build(6, "scaled"), samples), 3.0, 1e-12);
  EXPECT_NEAR(isometry_check(build(6, "correlated"), samples), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Rotations, PolynomialFieldsArePredictableStructurally) {
  for (const char* spec : {"identity", "constant", "surrogate"}) {
    const AdaptedIsometry r = build(4, spec);
    ASSERT_TRUE(r.fields().has_value()) << spec;
    EXPECT_TRUE(is_weakly_adapted(*r.fields())) << spec;
  }
  EXPECT_FALSE(build(4, "givens").fields().has_value());
}

TEST(Rotations, ItoFormMatchesDivergence) {
  const SampleBatch samples = sample_batch(4, 200, 9);
  for (const char* spec : {"constant", "surrogate", "identity"}) {
    const AdaptedIsometry r = build(4, spec);
    const VField t = divergence_op(*r.fields());
    for (std::size_t s = 0; s < samples.rows; ++s) {
      const auto tw = apply_rotation(r, samples.row(s));
      for (unsigned a = 0; a < 4; ++a) {
        EXPECT_NEAR(tw[a], evaluate(t[a], samples.row(s)), 1e-10) << spec;
      }
    }
  }
}

TEST(Rotations, ConstantRotationHasExactIdentityCovariance) {
  const AdaptedIsometry r = build(5, "constant", 11);
  const VField t = divergence_op(*r.fields());
  for (unsigned a = 0; a < 5; ++a) {
    for (unsigned b = 0; b < 5; ++b) {
      EXPECT_NEAR(l2_inner(t[a], t[b]), a == b ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Rotations, BasisInvariance) {
  const SampleBatch samples = sample_batch(2, 100, 4);
  const double c = 1.0 / std::sqrt(2.0);
  const std::vector<double> e = {1.0, 0.0, 0.0, 1.0};
  const std::vector<double> rot = {c, c, -c, c};
  EXPECT_LE(basis_invariance_check(build(2, "identity"), e, rot, samples), 1e-12);

  harness::Rng rng(5);
  const SampleBatch s5 = sample_batch(5, 500, 6);
  const auto h = harness::random_onb(rng, 5);
  const std::vector<double> id5 = [] {
    std::vector<double> v(25, 0.0);
    for (int i = 0; i < 5; ++i) v[i * 6] = 1.0;
    return v;
  }();
  for (const char* spec : {"sign", "givens", "constant"}) {
    EXPECT_LE(basis_invariance_check(build(5, spec), id5, h, s5), 1e-9) << spec;
  }
  const std::vector<double> skewed = {1.0, 0.0, 0.6, 0.8 + 1e-6};
  EXPECT_THROW(basis_invariance_check(build(2, "identity"), e, skewed, samples),
               PreconditionError);
}

TEST(Rotations, BatteriesAreDeterministic) {
  const AdaptedIsometry r = build(4, "givens");
  const auto a = measure_preservation_battery(r, 20000, 8);
  const auto b = measure_preservation_battery(r, 20000, 8);
  EXPECT_EQ(report_to_json(a), report_to_json(b));
  const auto j = nlohmann::json::parse(report_to_json(a));
  EXPECT_EQ(j["seed"], 8);
  EXPECT_EQ(j["N"], 20000);
  ASSERT_FALSE(j["tests"].empty());
  for (const char* key : {"name", "statistic", "threshold", "pass"}) {
    EXPECT_TRUE(j["tests"][0].contains(key)) << key;
  }
  EXPECT_EQ(find(a, "ks[1]").threshold, stats::ks_critical_value(kBatteryAlpha, 20000));
  EXPECT_NEAR(find(a, "cov[1,2]").threshold, 4.0 * std::sqrt(2.0 / 20000), 1e-15);
}

TEST(Rotations, ExactlyGaussianConstructionsPass) {
  const std::size_t n = 200000;
  EXPECT_TRUE(gaussianity_battery(build(4, "identity"), unit(4, 0), n, 20240611).passed());
  EXPECT_TRUE(gaussianity_battery(build(4, "sign"), unit(4, 1), n, 20240611).passed());
  EXPECT_TRUE(
      independence_battery(build(4, "sign"), unit(4, 0), unit(4, 1), n, 20240611).passed());
  EXPECT_THROW(independence_battery(build(4, "sign"), unit(4, 0), unit(4, 0), n, 1),
               PreconditionError);
}

TEST(Rotations, PlantedDefectsAreDetected) {
  const std::size_t n = 20000;
  const auto scaled = gaussianity_battery(build(4, "scaled"), unit(4, 1), n, 3);
  EXPECT_FALSE(scaled.passed());
  EXPECT_GT(find(scaled, "variance_z").statistic, 4.0);

  const auto corr = independence_battery(build(4, "correlated"), unit(4, 0), unit(4, 1), n, 3);
  EXPECT_FALSE(corr.passed());
  EXPECT_GT(find(corr, "correlation").statistic, find(corr, "correlation").threshold);

  EXPECT_FALSE(gaussianity_battery(build(4, "surrogate"), unit(4, 1), n, 3).passed());
  EXPECT_FALSE(measure_preservation_battery(build(4, "scaled"), n, 3).passed());
}

TEST(Rotations, ExtractFirstChaos) {
  const unsigned n = 3;
  // Permutation (eta_2, eta_3, eta_1).
  const std::vector<ChaosPoly> perm = {ChaosPoly::coordinate(n, 2), ChaosPoly::coordinate(n, 3),
                                       ChaosPoly::coordinate(n, 1)};
  const Extraction p = extract_rotation(perm, {});
  EXPECT_EQ(p.pathwise_deviation, 0.0);
  EXPECT_EQ(p.mean_deviation, 0.0);
  EXPECT_EQ(p.integrands(0, 1), ChaosPoly::constant(n, 1.0));
  for (double r : p.residuals) EXPECT_LE(r, 1e-12);

  const AdaptedIsometry q = build(n, "constant", 13);
  const VField t = divergence_op(*q.fields());
  const Extraction e = extract_rotation(t.components(), {});
  EXPECT_LE(e.pathwise_deviation, 1e-9);
  for (unsigned a = 0; a < n; ++a)
    for (unsigned j = 0; j < n; ++j)
      EXPECT_NEAR(expectation(e.integrands(a, j)), expectation((*q.fields())(a, j)), 1e-12);
}

TEST(Rotations, ExtractSurrogateIsReportedNotHidden) {
  const AdaptedIsometry s = build(2, "surrogate");
  const VField t = divergence_op(*s.fields());
  EXPECT_THROW(extract_rotation(t.components(), {}), PreconditionError);

  ExtractOptions opt;
  opt.check_input = false;
  const Extraction e1 = extract_rotation(t.components(), opt);
  EXPECT_GT(e1.pathwise_deviation, 0.1);
  opt.refine = 2;
  const Extraction e2 = extract_rotation(t.components(), opt);
  EXPECT_GT(e2.pathwise_deviation, 0.0);
  EXPECT_EQ(e2.integrands.ambient_dim(), 4u);
}
