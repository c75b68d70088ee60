#include <cmath>
#include <numeric>

#include <gtest/gtest.h>
#include <json.hpp>

#include "wienerlab/errors.hpp"
#include "wienerlab/harness/instances.hpp"
#include "wienerlab/statistics.hpp"
#include "wienerlab/wiener_space.hpp"

using namespace wienerlab;

namespace {

std::vector<double> column(const SampleBatch& b, unsigned c) {
  std::vector<double> out(b.rows);
  for (std::size_t r = 0; r < b.rows; ++r) out[r] = b.at(r, c);
  return out;
}

}  // namespace

TEST(WienerSpace, GridAndResolution) {
  const DiscreteWienerSpace space(4);
  const auto grid = space.grid();
  ASSERT_EQ(grid.size(), 5u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), 1.0);
  for (std::size_t k = 1; k < grid.size(); ++k) EXPECT_LT(grid[k - 1], grid[k]);
  EXPECT_THROW(DiscreteWienerSpace(0), PreconditionError);

  const ResolutionOfIdentity pi = space.resolution();
  const std::vector<double> h = {1.0, -2.0, 3.0, 0.5};
  EXPECT_EQ(pi.apply(0, h), std::vector<double>(4, 0.0));
  EXPECT_EQ(pi.apply(4, h), h);
  EXPECT_EQ(ResolutionOfIdentity(2).apply(1, std::vector<double>{1.0, 1.0}),
            (std::vector<double>{1.0, 0.0}));
  EXPECT_THROW(pi.apply(5, h), IndexOutOfRange);
  EXPECT_THROW(pi.apply(1, std::vector<double>{1.0}), DimensionMismatch);

  // Orthogonal projections, increasing in k.
  for (unsigned k = 0; k <= 4; ++k) {
    const auto m = pi.matrix(k);
    for (unsigned i = 0; i < 4; ++i) {
      for (unsigned j = 0; j < 4; ++j) {
        EXPECT_EQ(m[i * 4 + j], m[j * 4 + i]);
        double sq = 0.0;
        for (unsigned l = 0; l < 4; ++l) sq += m[i * 4 + l] * m[l * 4 + j];
        EXPECT_EQ(sq, m[i * 4 + j]);
      }
    }
    for (unsigned j = 0; j < k; ++j) {
      EXPECT_EQ(pi.apply(k, pi.apply(j, h)), pi.apply(j, h));
    }
  }
}

TEST(WienerSpace, SamplingIsDeterministicAndWorkerIndependent) {
  const SampleBatch a = sample_batch(2, 1, 99);
  const SampleBatch b = sample_batch(2, 1, 99);
  EXPECT_EQ(a.draws, b.draws);
  EXPECT_EQ(a.generator, std::string(kGeneratorId));

  const SampleBatch serial = sample_batch(5, 4099, 7, 1);
  for (unsigned workers : {2u, 3u, 8u}) {
    EXPECT_EQ(sample_batch(5, 4099, 7, workers).draws, serial.draws);
  }
  // A prefix of a batch is the smaller batch.
  const SampleBatch small = sample_batch(5, 10, 7);
  EXPECT_TRUE(std::equal(small.draws.begin(), small.draws.end(), serial.draws.begin()));
  EXPECT_NE(sample_batch(5, 10, 8).draws, small.draws);
  EXPECT_THROW(sample_batch(2, 0, 1), PreconditionError);
}

TEST(WienerSpace, SampleMomentsAndIndependence) {
  const std::size_t n = 100000;
  const SampleBatch b = sample_batch(3, n, 2024);
  for (unsigned c = 0; c < 3; ++c) {
    const auto m = stats::sample_moments(column(b, c));
    EXPECT_LE(std::abs(m.mean), 4.0 / std::sqrt(double(n)));
    EXPECT_LE(std::abs(m.variance - 1.0), 4.0 * std::sqrt(2.0 / n));
  }
  EXPECT_LE(std::abs(stats::correlation(column(b, 0), column(b, 1))), 4.0 / std::sqrt(double(n)));
}

TEST(WienerSpace, DeltaH) {
  const std::vector<double> s = {0.3, -1.2};
  EXPECT_EQ(delta_h(std::vector<double>{1.0, 0.0}, s), 0.3);
  EXPECT_EQ(delta_h(std::vector<double>{0.0, 0.0}, s), 0.0);
  EXPECT_THROW(delta_h(std::vector<double>{1.0}, s), DimensionMismatch);

  const std::size_t n = 200000;
  const SampleBatch b = sample_batch(2, n, 5);
  std::vector<double> v(n);
  const std::vector<double> h = {0.6, 0.8};
  for (std::size_t r = 0; r < n; ++r) v[r] = delta_h(h, b.row(r));
  EXPECT_LE(stats::ks_statistic_normal(v), stats::ks_critical_value(0.01, n));

  // Moment normality for random unit directions.
  harness::Rng rng(6);
  const SampleBatch b4 = sample_batch(4, 100000, 6);
  for (int t = 0; t < 10; ++t) {
    const auto onb = harness::random_onb(rng, 4);
    std::vector<double> w(b4.rows);
    for (std::size_t r = 0; r < b4.rows; ++r) {
      w[r] = delta_h(std::span<const double>(onb.data(), 4), b4.row(r));
    }
    const auto m = stats::sample_moments(w);
    EXPECT_LE(std::abs(m.skewness), 4.0 * std::sqrt(6.0 / b4.rows));
    EXPECT_LE(std::abs(m.excess_kurtosis), 4.0 * std::sqrt(24.0 / b4.rows));
  }
}

TEST(WienerSpace, MonteCarloEstimates) {
  const SampleBatch b = sample_batch(1, 100000, 31);
  const auto e2 = mc_estimate(ChaosPoly::hermite(1, 1, 2), b);
  EXPECT_LE(std::abs(e2.mean), 4.0 * e2.std_error);
  EXPECT_NEAR(e2.ci95_lo, e2.mean - 1.96 * e2.std_error, 1e-15);
  EXPECT_NEAR(e2.ci95_hi, e2.mean + 1.96 * e2.std_error, 1e-15);

  const auto one = mc_estimate(ChaosPoly::constant(1, 1.0), b);
  EXPECT_EQ(one.mean, 1.0);
  EXPECT_EQ(one.std_error, 0.0);

  const ChaosPoly sq = ChaosPoly::coordinate(1, 1) * ChaosPoly::coordinate(1, 1);
  const auto esq = mc_estimate(sq, b);
  EXPECT_LE(std::abs(esq.mean - 1.0), 4.0 * esq.std_error);
  EXPECT_THROW(mc_estimate(ChaosPoly::coordinate(2, 1), b), DimensionMismatch);

  harness::Rng rng(32);
  for (int t = 0; t < 20; ++t) {
    const ChaosPoly p = harness::random_poly(rng, {8, 4, 5, 8});
    const auto est = mc_estimate(p, sample_batch(8, 100000, 1000 + t));
    EXPECT_LE(std::abs(est.mean - expectation(p)), 4.0 * std::max(est.std_error, 1e-12));
  }
}

TEST(WienerSpace, PairwiseSumIsFixedAndAccurate) {
  std::vector<double> v(10007);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / double(i + 1);
  long double ref = 0.0L;
  for (double x : v) ref += x;
  EXPECT_NEAR(pairwise_sum(v), double(ref), 1e-13);
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(v));
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(WienerSpace, IdentityDivergenceGrowth) {
  const std::vector<unsigned> dims = {1, 2, 4, 8};
  const auto table = identity_divergence_growth(dims);
  ASSERT_EQ(table.size(), 4u);
  EXPECT_NEAR(table[0].norm, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(table[2].norm, std::sqrt(8.0), 1e-12);
  for (std::size_t i = 1; i < table.size(); ++i) {
    EXPECT_NEAR(table[i].norm / table[i - 1].norm, std::sqrt(2.0), 1e-12);
  }
}

TEST(WienerSpace, Exports) {
  const SampleBatch b = sample_batch(3, 2, 1);
  const std::string csv = batch_to_csv(b);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "eta_1,eta_2,eta_3");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);

  MonteCarloEstimate est{0.5, 0.1, 100, 0.304, 0.696};
  const auto j = nlohmann::json::parse(estimate_to_json(est, 17));
  for (const char* key : {"mean", "stderr", "n_samples", "ci95_lo", "ci95_hi", "seed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["seed"], 17);
  EXPECT_EQ(j["n_samples"], 100);
}
