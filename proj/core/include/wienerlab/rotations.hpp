#pragma once

// Measure-preserving rotations Tw = delta R of the discretized Wiener space.
//
// R is described by its frame at each sample: R(omega) is an n x k matrix
// whose column a is the H-field R e_a, and T_a = delta(R e_a). Predictability
// of every field R e_a means row j of R(omega) depends on eta_1..eta_{j-1}
// only; the sequential constructions build these rows one after another as
// an orthonormal frame, which makes T exactly N(0, I) on the grid.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wienerlab/adapted.hpp"
#include "wienerlab/wiener_space.hpp"

namespace wienerlab {

enum class RotationKind {
  kIdentity,
  kSign,       // row j = sign(eta_{j-1}) e_j
  kConstant,   // a fixed orthogonal Q drawn from the seed
  kGivens,     // bounded arctan angles of past coordinates
  kScaledColumn,       // planted defect: one field doubled
  kCorrelatedColumns,  // planted defect: two fields share a direction
  kSurrogate,          // polynomial psi(eta_1) e_2 with E psi^2 = 1, not isometric
};

struct AngleSpec {
  RotationKind kind = RotationKind::kGivens;
  /// Scale of the arctan angles (kGivens).
  double amplitude = 1.0;
  /// Optional deterministic first frame vector (kGivens).
  std::vector<double> first_vector;
  /// 1-based field index targeted by the planted defects.
  unsigned defect_column = 2;
};

/// "identity" | "zero" | "sign" | "constant" | "givens[:amplitude]" |
/// "scaled[:column]" | "correlated[:column]" | "surrogate".
AngleSpec parse_angle_spec(std::string_view text);
std::string to_string(const AngleSpec& spec);

class AdaptedIsometry {
 public:
  using FrameFn = std::function<Eigen::MatrixXd(std::span<const double>)>;

  AdaptedIsometry(unsigned ambient_dim, unsigned rank, std::string descriptor,
                  std::uint64_t seed, FrameFn frame,
                  std::optional<OperatorField> fields = std::nullopt);
  /// Row a of `fields` is the H-field R e_a.
  static AdaptedIsometry from_fields(OperatorField fields, std::string descriptor,
                                     std::uint64_t seed = 0);

  unsigned ambient_dim() const noexcept { return ambient_dim_; }
  unsigned rank() const noexcept { return rank_; }
  const std::string& descriptor() const noexcept { return descriptor_; }
  std::uint64_t seed() const noexcept { return seed_; }
  /// R(omega): ambient_dim x rank, column a = (R e_a)(omega).
  Eigen::MatrixXd matrix(std::span<const double> sample) const;
  /// Polynomial form when every entry is a polynomial functional.
  const std::optional<OperatorField>& fields() const noexcept { return fields_; }

 private:
  unsigned ambient_dim_;
  unsigned rank_;
  std::string descriptor_;
  std::uint64_t seed_;
  FrameFn frame_;
  std::optional<OperatorField> fields_;
};

/// Throws PreconditionError on n == 0 or a degenerate spec.
AdaptedIsometry build_sequential_isometry(unsigned n, std::uint64_t seed,
                                          const AngleSpec& spec);

/// (delta(R e_1), ..., delta(R e_k)) at the sample, in Ito form.
std::vector<double> apply_rotation(const AdaptedIsometry& r,
                                   std::span<const double> sample);

struct BatteryTest {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RotationReport {
  std::vector<BatteryTest> tests;
  std::uint64_t seed = 0;
  std::size_t samples = 0;

  bool passed() const;
  void append(const RotationReport& other);
};

std::string report_to_json(const RotationReport& report);

inline constexpr double kBatteryAlpha = 0.01;
inline constexpr double kBatteryZ = 4.0;

RotationReport gaussianity_battery(const AdaptedIsometry& r, std::span<const double> h,
                                   std::size_t samples, std::uint64_t seed);
/// Throws PreconditionError unless (h1, h2) = 0.
RotationReport independence_battery(const AdaptedIsometry& r, std::span<const double> h1,
                                    std::span<const double> h2, std::size_t samples,
                                    std::uint64_t seed);
RotationReport measure_preservation_battery(const AdaptedIsometry& r,
                                            std::size_t samples, std::uint64_t seed);

/// max over samples of max_{a,b} |(R^T R - I)_{ab}|.
double isometry_check(const AdaptedIsometry& r, const SampleBatch& samples);
/// Rows of each matrix are basis vectors (row-major n x n). Throws
/// PreconditionError if either is not orthonormal.
double basis_invariance_check(const AdaptedIsometry& r, std::span<const double> basis_a,
                              std::span<const double> basis_b,
                              const SampleBatch& samples);
/// Perturbs eta_j..eta_n at each sample and confirms row j of R(omega) does
/// not move.
bool check_predictability_pathwise(const AdaptedIsometry& r, const SampleBatch& samples);

struct ExtractOptions {
  unsigned refine = 1;
  std::size_t input_samples = 20000;
  std::size_t deviation_samples = 1000;
  std::uint64_t seed = 1;
  bool check_input = true;
};

struct Extraction {
  AdaptedIsometry isometry;
  /// Row i is the adapted integrand u_i of T_i on the refined grid.
  OperatorField integrands;
  RotationReport input_report;
  double pathwise_deviation = 0.0;
  /// max_{a,b} |E(u_a, u_b)_H - [a == b]|, exact.
  double mean_deviation = 0.0;
  /// Clark residual of each component.
  std::vector<double> residuals;
};

/// Recovers R with R e_i = u_i from T_i = delta(u_i). Throws
/// PreconditionError when the inputs fail the Gaussian/independence battery.
Extraction extract_rotation(const std::vector<ChaosPoly>& t, const ExtractOptions& options);

/// Haar-distributed orthogonal matrix from the seed.
Eigen::MatrixXd random_orthogonal(unsigned n, std::uint64_t seed);

}  // namespace wienerlab
