#include "wienerlab/wiener_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "wienerlab/errors.hpp"
#include "wienerlab/malliavin.hpp"

namespace wienerlab {

std::vector<double> ResolutionOfIdentity::apply(unsigned k,
                                                std::span<const double> h) const {
  if (k > n_) {
    throw IndexOutOfRange("pi_" + std::to_string(k) + " outside 0.." +
                          std::to_string(n_));
  }
  if (h.size() != n_) {
    throw DimensionMismatch("pi_k: vector of length " + std::to_string(h.size()) +
                            " for n = " + std::to_string(n_));
  }
  std::vector<double> out(h.begin(), h.end());
  std::fill(out.begin() + k, out.end(), 0.0);
  return out;
}

std::vector<double> ResolutionOfIdentity::matrix(unsigned k) const {
  if (k > n_) {
    throw IndexOutOfRange("pi_" + std::to_string(k) + " outside 0.." +
                          std::to_string(n_));
  }
  std::vector<double> m(static_cast<std::size_t>(n_) * n_, 0.0);
  for (unsigned i = 0; i < k; ++i) m[static_cast<std::size_t>(i) * n_ + i] = 1.0;
  return m;
}

DiscreteWienerSpace::DiscreteWienerSpace(unsigned n) : n_(n) {
  if (n == 0) throw PreconditionError("wiener space needs at least one cell");
  if (n > kDimensionCap) {
    throw DimensionCapExceeded("wiener space of " + std::to_string(n) +
                               " cells exceeds dimension cap");
  }
}

double DiscreteWienerSpace::grid_point(unsigned k) const {
  if (k > n_) {
    throw IndexOutOfRange("grid index " + std::to_string(k) + " outside 0.." +
                          std::to_string(n_));
  }
  return k == n_ ? 1.0 : static_cast<double>(k) / static_cast<double>(n_);
}

std::vector<double> DiscreteWienerSpace::grid() const {
  std::vector<double> g(n_ + 1);
  for (unsigned k = 0; k <= n_; ++k) g[k] = grid_point(k);
  return g;
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += kGamma);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform_open0() noexcept {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

void fill_rows(SampleBatch& batch, std::uint64_t base_state, std::size_t begin,
               std::size_t end) {
  const unsigned dim = batch.dim;
  const std::uint64_t per_row = dim + (dim % 2);
  for (std::size_t r = begin; r < end; ++r) {
    SplitMix64 gen(base_state);
    gen.jump(static_cast<std::uint64_t>(r) * per_row);
    double* out = batch.draws.data() + r * dim;
    for (unsigned c = 0; c < dim; c += 2) {
      const double u1 = gen.uniform_open0();
      const double u2 = gen.uniform();
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      out[c] = radius * std::cos(angle);
      if (c + 1 < dim) out[c + 1] = radius * std::sin(angle);
    }
  }
}

}  // namespace

SampleBatch sample_batch(unsigned dim, std::size_t rows, std::uint64_t seed,
                         unsigned workers) {
  if (rows == 0) throw PreconditionError("sample_batch: need N >= 1");
  SampleBatch batch;
  batch.rows = rows;
  batch.dim = dim;
  batch.seed = seed;
  batch.draws.assign(rows * dim, 0.0);
  SplitMix64 scramble(seed);
  const std::uint64_t base_state = scramble.next();

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows)));
  if (workers == 1) {
    fill_rows(batch, base_state, 0, rows);
    return batch;
  }
  std::vector<std::jthread> pool;
  const std::size_t block = (rows + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(rows, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&batch, base_state, begin, end] {
      fill_rows(batch, base_state, begin, end);
    });
  }
  return batch;
}

SampleBatch sample_batch(const DiscreteWienerSpace& space, std::size_t rows,
                         std::uint64_t seed, unsigned workers) {
  return sample_batch(space.size(), rows, seed, workers);
}

double delta_h(std::span<const double> h, std::span<const double> sample) {
  if (h.size() != sample.size()) {
    throw DimensionMismatch("delta_h: direction of length " +
                            std::to_string(h.size()) + " for sample of length " +
                            std::to_string(sample.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) sum += h[i] * sample[i];
  return sum;
}

// ---------------------------------------------------------------------------
// Estimation

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 64;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  // Split at a multiple of the leaf size so the tree shape depends only on
  // the length.
  const std::size_t leaves = (values.size() + kLeaf - 1) / kLeaf;
  const std::size_t half = (leaves / 2) * kLeaf;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MonteCarloEstimate estimate_mean(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("estimate_mean: no values");
  const double n = static_cast<double>(values.size());
  MonteCarloEstimate est;
  est.samples = values.size();
  est.mean = pairwise_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - est.mean;
      sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    est.std_error = std::sqrt(var / n);
  }
  est.ci95_lo = est.mean - 1.96 * est.std_error;
  est.ci95_hi = est.mean + 1.96 * est.std_error;
  return est;
}

MonteCarloEstimate mc_estimate(const ChaosPoly& p, const SampleBatch& batch) {
  if (p.dim() != batch.dim) {
    throw DimensionMismatch("mc_estimate: functional of dimension " +
                            std::to_string(p.dim()) + " for batch of dimension " +
                            std::to_string(batch.dim));
  }
  std::vector<double> values(batch.rows);
  for (std::size_t r = 0; r < batch.rows; ++r) values[r] = evaluate(p, batch.row(r));
  return estimate_mean(values);
}

std::vector<DivergenceGrowthRow> identity_divergence_growth(
    std::span<const unsigned> dims) {
  std::vector<DivergenceGrowthRow> table;
  for (unsigned n : dims) {
    std::vector<ChaosPoly> coords;
    for (unsigned i = 1; i <= n; ++i) coords.push_back(ChaosPoly::coordinate(n, i));
    const ChaosPoly div = divergence_h(HField(std::move(coords)));
    table.push_back({n, l2_norm(div), std::sqrt(2.0 * n)});
  }
  return table;
}

std::string batch_to_csv(const SampleBatch& batch) {
  std::string out;
  for (unsigned c = 1; c <= batch.dim; ++c) {
    if (c > 1) out += ',';
    out += "eta_" + std::to_string(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < batch.rows; ++r) {
    for (unsigned c = 0; c < batch.dim; ++c) {
      if (c > 0) out += ',';
      out += format_number(batch.at(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string estimate_to_json(const MonteCarloEstimate& est, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["mean"] = est.mean;
  j["stderr"] = est.std_error;
  j["n_samples"] = est.samples;
  j["ci95_lo"] = est.ci95_lo;
  j["ci95_hi"] = est.ci95_hi;
  j["seed"] = seed;
  return j.dump(2);
}

}  // namespace wienerlab
