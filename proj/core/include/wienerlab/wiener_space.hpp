#pragma once

// Discretized Wiener space: a uniform grid on [0,1] with n cells, H = R^n
// in the basis of normalized increments, the induced resolution of the
// identity, and reproducible Gaussian sampling for Monte Carlo cross-checks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wienerlab/chaos.hpp"

namespace wienerlab {

/// pi_k on H = R^n: keeps coordinates 1..k and zeroes the rest.
class ResolutionOfIdentity {
 public:
  explicit ResolutionOfIdentity(unsigned n) : n_(n) {}

  unsigned size() const noexcept { return n_; }
  std::vector<double> apply(unsigned k, std::span<const double> h) const;
  /// Dense row-major n x n matrix of pi_k.
  std::vector<double> matrix(unsigned k) const;

 private:
  unsigned n_;
};

class DiscreteWienerSpace {
 public:
  explicit DiscreteWienerSpace(unsigned n);

  unsigned size() const noexcept { return n_; }
  /// theta_k = k / n for k = 0..n.
  double grid_point(unsigned k) const;
  std::vector<double> grid() const;
  ResolutionOfIdentity resolution() const { return ResolutionOfIdentity(n_); }

 private:
  unsigned n_;
};

/// Counter-based SplitMix64. Jumping ahead by k outputs is O(1), which is
/// how row blocks get independent, order-free substreams.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() noexcept;
  void jump(std::uint64_t steps) noexcept { state_ += steps * kGamma; }
  /// Uniform on (0, 1].
  double uniform_open0() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;

 private:
  std::uint64_t state_;
};

inline constexpr const char* kGeneratorId = "splitmix64-boxmuller/v1";

/// N x n matrix of i.i.d. standard Gaussians, row-major.
struct SampleBatch {
  std::size_t rows = 0;
  unsigned dim = 0;
  std::vector<double> draws;
  std::uint64_t seed = 0;
  std::string generator = kGeneratorId;

  std::span<const double> row(std::size_t r) const {
    return {draws.data() + r * dim, dim};
  }
  double at(std::size_t r, unsigned c) const { return draws[r * dim + c]; }
};

/// Draws depend only on (seed, row, column): any `workers` value gives the
/// same batch bit for bit.
SampleBatch sample_batch(const DiscreteWienerSpace& space, std::size_t rows,
                         std::uint64_t seed, unsigned workers = 1);
SampleBatch sample_batch(unsigned dim, std::size_t rows, std::uint64_t seed,
                         unsigned workers = 1);

/// delta(h) at a sample: sum_i h_i eta_i.
double delta_h(std::span<const double> h, std::span<const double> sample);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
};

/// Mean and standard error of `values`, reduced by a fixed pairwise tree.
MonteCarloEstimate estimate_mean(std::span<const double> values);
MonteCarloEstimate mc_estimate(const ChaosPoly& p, const SampleBatch& batch);

/// Fixed-shape pairwise summation (leaf blocks of 64).
double pairwise_sum(std::span<const double> values);

struct DivergenceGrowthRow {
  unsigned n = 0;
  double norm = 0.0;      // ||delta(1_H truncated to n)||_{L^2}
  double expected = 0.0;  // sqrt(2n)
};

/// For each n: the exact L^2 norm of delta of the field w -> sum_i eta_i e_i.
std::vector<DivergenceGrowthRow> identity_divergence_growth(
    std::span<const unsigned> dims);

std::string batch_to_csv(const SampleBatch& batch);
std::string estimate_to_json(const MonteCarloEstimate& est, std::uint64_t seed);

}  // namespace wienerlab
