#include "wienerlab/rotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "wienerlab/clark_ocone.hpp"
#include "wienerlab/errors.hpp"
#include "wienerlab/statistics.hpp"

namespace wienerlab {

namespace {

constexpr double kOrthonormalTolerance = 1e-12;

unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw PreconditionError("angle spec: bad " + std::string(what) + " '" +
                            std::string(text) + "'");
  }
  return value;
}

// Deterministic coefficient in [-1, 1) addressed by (seed, slot).
double angle_coefficient(std::uint64_t seed, std::uint64_t slot) {
  SplitMix64 gen(SplitMix64(seed).next());
  gen.jump(slot);
  return 2.0 * gen.uniform() - 1.0;
}

// Orthogonal B with B e_1 = v / |v| (Householder reflector).
Eigen::MatrixXd frame_with_first(const std::vector<double>& v) {
  const auto n = static_cast<Eigen::Index>(v.size());
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  const double norm = x.norm();
  if (!(norm > 1e-12)) {
    throw PreconditionError("angle spec: first frame vector collapses to zero");
  }
  x /= norm;
  Eigen::VectorXd w = x - Eigen::VectorXd::Unit(n, 0);
  if (w.norm() < 1e-15) return Eigen::MatrixXd::Identity(n, n);
  w.normalize();
  return Eigen::MatrixXd::Identity(n, n) - 2.0 * w * w.transpose();
}

// Row j of the result is built from eta_0..eta_{j-1} only: column j of B is
// frozen once step j has run, since later steps rotate higher columns.
Eigen::MatrixXd givens_frame(unsigned n, std::uint64_t seed, const AngleSpec& spec,
                             const Eigen::MatrixXd& start, std::span<const double> eta) {
  Eigen::MatrixXd b = start;
  const unsigned first = spec.first_vector.empty() ? 0 : 1;
  for (unsigned j = first; j < n; ++j) {
    for (unsigned k = j + 1; k < n; ++k) {
      const std::uint64_t slot = 4ULL * (static_cast<std::uint64_t>(j) * n + k);
      double p = angle_coefficient(seed, slot);
      if (j >= 1) {
        const double x = eta[j - 1];
        p += angle_coefficient(seed, slot + 1) * x +
             0.5 * angle_coefficient(seed, slot + 2) * (x * x - 1.0);
      }
      if (j >= 2) p += angle_coefficient(seed, slot + 3) * eta[j - 2];
      const double theta = spec.amplitude * std::atan(p);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      const Eigen::VectorXd cj = b.col(j);
      b.col(j) = c * cj + s * b.col(k);
      b.col(k) = -s * cj + c * b.col(k);
    }
    b.col(j).normalize();
  }
  return b.transpose();
}

OperatorField fields_of_matrix(const Eigen::MatrixXd& m) {
  const auto n = static_cast<unsigned>(m.rows());
  const auto k = static_cast<unsigned>(m.cols());
  std::vector<ChaosPoly> entries;
  for (unsigned a = 0; a < k; ++a) {
    for (unsigned j = 0; j < n; ++j) entries.push_back(ChaosPoly::constant(n, m(j, a)));
  }
  return OperatorField(k, n, std::move(entries));
}

// Odd cubic closest to sign in L^2(N(0,1)), rescaled to E psi^2 = 1.
ChaosPoly surrogate_psi(unsigned n) {
  const double c1 = std::sqrt(2.0 / std::numbers::pi);
  const double c3 = -c1 / 6.0;
  const double scale = 1.0 / std::sqrt(c1 * c1 + 6.0 * c3 * c3);
  return scale * (c1 * ChaosPoly::hermite(n, 1, 1) + c3 * ChaosPoly::hermite(n, 1, 3));
}

Eigen::MatrixXd rows_matrix(std::span<const double> basis, unsigned n, const char* what) {
  if (basis.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionMismatch(std::string("basis_invariance_check: ") + what +
                            " is not n x n");
  }
  Eigen::MatrixXd b(n, n);
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) b(i, j) = basis[i * n + j];
  }
  const double dev = (b * b.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > kOrthonormalTolerance) {
    throw PreconditionError(std::string("basis_invariance_check: ") + what +
                            " is not orthonormal");
  }
  return b;
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

void gaussian_tests(RotationReport& report, const std::string& prefix,
                    std::span<const double> values) {
  const std::size_t n = values.size();
  const double root_n = std::sqrt(static_cast<double>(n));
  const double d = stats::ks_statistic_normal(values);
  const double crit = stats::ks_critical_value(kBatteryAlpha, n);
  report.tests.push_back({prefix + "ks", d, crit, d <= crit});

  const stats::Moments m = stats::sample_moments(values);
  const double dn = static_cast<double>(n);
  const double z[4] = {
      m.mean * root_n,
      (m.variance - 1.0) / std::sqrt(2.0 / dn),
      m.skewness / std::sqrt(6.0 / dn),
      m.excess_kurtosis / std::sqrt(24.0 / dn),
  };
  const char* names[4] = {"mean_z", "variance_z", "skewness_z", "kurtosis_z"};
  for (int i = 0; i < 4; ++i) {
    report.tests.push_back({prefix + names[i], std::abs(z[i]), kBatteryZ,
                            std::abs(z[i]) <= kBatteryZ});
  }
}

void independence_tests(RotationReport& report, const std::string& prefix,
                        std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double rho = std::abs(stats::correlation(x, y));
  const double rho_crit = kBatteryZ / std::sqrt(static_cast<double>(n));
  report.tests.push_back({prefix + "correlation", rho, rho_crit, rho <= rho_crit});

  using Fn = double (*)(double);
  const std::pair<const char*, Fn> fns[3] = {
      {"x", [](double v) { return v; }},
      {"x2m1", [](double v) { return v * v - 1.0; }},
      {"sign", [](double v) { return sign_of(v); }},
  };
  std::vector<double> fx(n), gy(n), prod(n);
  for (const auto& [fname, f] : fns) {
    for (const auto& [gname, g] : fns) {
      for (std::size_t r = 0; r < n; ++r) {
        fx[r] = f(x[r]);
        gy[r] = g(y[r]);
        prod[r] = fx[r] * gy[r];
      }
      const MonteCarloEstimate joint = estimate_mean(prod);
      const double gap = joint.mean - estimate_mean(fx).mean * estimate_mean(gy).mean;
      const double z = joint.std_error > 0.0 ? std::abs(gap) / joint.std_error : 0.0;
      report.tests.push_back({prefix + "factor[" + fname + "," + gname + "]", z,
                              kBatteryZ, z <= kBatteryZ});
    }
  }
}

// N x k matrix of rotated samples, row-major.
std::vector<double> rotated_samples(const AdaptedIsometry& r, std::size_t samples,
                                    std::uint64_t seed) {
  const SampleBatch batch = sample_batch(r.ambient_dim(), samples, seed, default_workers());
  std::vector<double> out(samples * r.rank());
  for (std::size_t s = 0; s < samples; ++s) {
    const std::vector<double> t = apply_rotation(r, batch.row(s));
    std::copy(t.begin(), t.end(), out.begin() + static_cast<std::ptrdiff_t>(s * r.rank()));
  }
  return out;
}

std::vector<double> column(const std::vector<double>& rows, unsigned width, unsigned c) {
  std::vector<double> out(rows.size() / width);
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = rows[s * width + c];
  return out;
}

}  // namespace

AngleSpec parse_angle_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
  AngleSpec spec;
  if (head == "identity" || head == "zero") {
    spec.kind = RotationKind::kIdentity;
  } else if (head == "sign") {
    spec.kind = RotationKind::kSign;
  } else if (head == "constant") {
    spec.kind = RotationKind::kConstant;
  } else if (head == "givens") {
    spec.kind = RotationKind::kGivens;
    if (!arg.empty()) spec.amplitude = parse_double(arg, "amplitude");
  } else if (head == "scaled" || head == "correlated") {
    spec.kind = head == "scaled" ? RotationKind::kScaledColumn
                                 : RotationKind::kCorrelatedColumns;
    if (!arg.empty()) {
      const double c = parse_double(arg, "column");
      if (c < 1.0 || c != std::floor(c)) {
        throw PreconditionError("angle spec: defect column must be a positive integer");
      }
      spec.defect_column = static_cast<unsigned>(c);
    }
  } else if (head == "surrogate") {
    spec.kind = RotationKind::kSurrogate;
  } else {
    throw PreconditionError("angle spec: unknown kind '" + std::string(head) + "'");
  }
  if (!arg.empty() && spec.kind != RotationKind::kGivens &&
      spec.kind != RotationKind::kScaledColumn &&
      spec.kind != RotationKind::kCorrelatedColumns) {
    throw PreconditionError("angle spec: '" + std::string(head) + "' takes no argument");
  }
  return spec;
}

std::string to_string(const AngleSpec& spec) {
  switch (spec.kind) {
    case RotationKind::kIdentity: return "identity";
    case RotationKind::kSign: return "sign";
    case RotationKind::kConstant: return "constant";
    case RotationKind::kGivens: return "givens:" + format_number(spec.amplitude);
    case RotationKind::kScaledColumn:
      return "scaled:" + std::to_string(spec.defect_column);
    case RotationKind::kCorrelatedColumns:
      return "correlated:" + std::to_string(spec.defect_column);
    case RotationKind::kSurrogate: return "surrogate";
  }
  return "unknown";
}

AdaptedIsometry::AdaptedIsometry(unsigned ambient_dim, unsigned rank, std::string descriptor,
                                 std::uint64_t seed, FrameFn frame,
                                 std::optional<OperatorField> fields)
    : ambient_dim_(ambient_dim),
      rank_(rank),
      descriptor_(std::move(descriptor)),
      seed_(seed),
      frame_(std::move(frame)),
      fields_(std::move(fields)) {
  if (fields_ && (fields_->target_dim() != rank_ || fields_->ambient_dim() != ambient_dim_)) {
    throw DimensionMismatch("AdaptedIsometry: field shape does not match");
  }
}

AdaptedIsometry AdaptedIsometry::from_fields(OperatorField fields, std::string descriptor,
                                             std::uint64_t seed) {
  const unsigned n = fields.ambient_dim();
  const unsigned k = fields.target_dim();
  auto shared = std::make_shared<const OperatorField>(fields);
  FrameFn frame = [shared, n, k](std::span<const double> eta) {
    Eigen::MatrixXd m(n, k);
    for (unsigned a = 0; a < k; ++a) {
      for (unsigned j = 0; j < n; ++j) m(j, a) = evaluate((*shared)(a, j), eta);
    }
    return m;
  };
  return AdaptedIsometry(n, k, std::move(descriptor), seed, std::move(frame),
                         std::move(fields));
}

Eigen::MatrixXd AdaptedIsometry::matrix(std::span<const double> sample) const {
  if (sample.size() != ambient_dim_) {
    throw DimensionMismatch("AdaptedIsometry: sample length does not match n");
  }
  return frame_(sample);
}

Eigen::MatrixXd random_orthogonal(unsigned n, std::uint64_t seed) {
  const SampleBatch g = sample_batch(n, n, seed);
  Eigen::MatrixXd a(n, n);
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) a(i, j) = g.at(i, j);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (unsigned j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

AdaptedIsometry build_sequential_isometry(unsigned n, std::uint64_t seed,
                                          const AngleSpec& spec) {
  if (n == 0) throw PreconditionError("build_sequential_isometry: n must be >= 1");
  if (n > kDimensionCap) throw DimensionCapExceeded("build_sequential_isometry: n above cap");
  const std::string desc = to_string(spec);

  switch (spec.kind) {
    case RotationKind::kIdentity: {
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      return AdaptedIsometry::from_fields(fields_of_matrix(id), desc, seed);
    }
    case RotationKind::kConstant: {
      return AdaptedIsometry::from_fields(fields_of_matrix(random_orthogonal(n, seed)), desc,
                                          seed);
    }
    case RotationKind::kSign: {
      auto frame = [n](std::span<const double> eta) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
        for (unsigned j = 1; j < n; ++j) m(j, j) = sign_of(eta[j - 1]);
        return m;
      };
      return AdaptedIsometry(n, n, desc, seed, frame);
    }
    case RotationKind::kGivens: {
      if (!spec.first_vector.empty() && spec.first_vector.size() != n) {
        throw DimensionMismatch("angle spec: first frame vector has the wrong length");
      }
      if (!std::isfinite(spec.amplitude)) {
        throw PreconditionError("angle spec: amplitude must be finite");
      }
      const Eigen::MatrixXd start = spec.first_vector.empty()
                                        ? Eigen::MatrixXd::Identity(n, n)
                                        : frame_with_first(spec.first_vector);
      auto frame = [n, seed, spec, start](std::span<const double> eta) {
        return givens_frame(n, seed, spec, start, eta);
      };
      return AdaptedIsometry(n, n, desc, seed, frame);
    }
    case RotationKind::kScaledColumn:
    case RotationKind::kCorrelatedColumns: {
      const unsigned c = spec.defect_column;
      const bool correlated = spec.kind == RotationKind::kCorrelatedColumns;
      if (c > n || (correlated && c < 2)) {
        throw PreconditionError("angle spec: defect column out of range");
      }
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
      if (correlated) {
        m(c - 2, c - 1) = m(c - 1, c - 1) = 1.0 / std::sqrt(2.0);
      } else {
        m(c - 1, c - 1) = 2.0;
      }
      return AdaptedIsometry::from_fields(fields_of_matrix(m), desc, seed);
    }
    case RotationKind::kSurrogate: {
      if (n < 2) throw PreconditionError("angle spec: surrogate needs n >= 2");
      std::vector<ChaosPoly> entries;
      for (unsigned a = 0; a < n; ++a) {
        for (unsigned j = 0; j < n; ++j) {
          if (a == 1 && j == 1) {
            entries.push_back(surrogate_psi(n));
          } else {
            entries.push_back(ChaosPoly::constant(n, a == j ? 1.0 : 0.0));
          }
        }
      }
      return AdaptedIsometry::from_fields(OperatorField(n, n, std::move(entries)), desc,
                                          seed);
    }
  }
  throw PreconditionError("build_sequential_isometry: unknown angle spec");
}

std::vector<double> apply_rotation(const AdaptedIsometry& r, std::span<const double> sample) {
  const Eigen::MatrixXd m = r.matrix(sample);
  const Eigen::Map<const Eigen::VectorXd> eta(sample.data(),
                                              static_cast<Eigen::Index>(sample.size()));
  const Eigen::VectorXd t = m.transpose() * eta;
  return {t.data(), t.data() + t.size()};
}

bool RotationReport::passed() const {
  return std::all_of(tests.begin(), tests.end(), [](const BatteryTest& t) { return t.pass; });
}

void RotationReport::append(const RotationReport& other) {
  tests.insert(tests.end(), other.tests.begin(), other.tests.end());
}

std::string report_to_json(const RotationReport& report) {
  nlohmann::ordered_json j;
  auto tests = nlohmann::ordered_json::array();
  for (const auto& t : report.tests) {
    tests.push_back({{"name", t.name},
                     {"statistic", t.statistic},
                     {"threshold", t.threshold},
                     {"pass", t.pass}});
  }
  j["tests"] = std::move(tests);
  j["seed"] = report.seed;
  j["N"] = report.samples;
  return j.dump(2);
}

RotationReport gaussianity_battery(const AdaptedIsometry& r, std::span<const double> h,
                                   std::size_t samples, std::uint64_t seed) {
  if (h.size() != r.rank()) throw DimensionMismatch("gaussianity_battery: |h| != rank");
  double norm = 0.0;
  for (double x : h) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw PreconditionError("gaussianity_battery: h must be nonzero");

  const std::vector<double> t = rotated_samples(r, samples, seed);
  std::vector<double> values(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    double v = 0.0;
    for (unsigned a = 0; a < r.rank(); ++a) v += h[a] * t[s * r.rank() + a];
    values[s] = v / norm;
  }
  RotationReport report{{}, seed, samples};
  gaussian_tests(report, "", values);
  return report;
}

RotationReport independence_battery(const AdaptedIsometry& r, std::span<const double> h1,
                                    std::span<const double> h2, std::size_t samples,
                                    std::uint64_t seed) {
  if (h1.size() != r.rank() || h2.size() != r.rank()) {
    throw DimensionMismatch("independence_battery: direction length != rank");
  }
  double dot = 0.0, n1 = 0.0, n2 = 0.0;
  for (unsigned a = 0; a < r.rank(); ++a) {
    dot += h1[a] * h2[a];
    n1 += h1[a] * h1[a];
    n2 += h2[a] * h2[a];
  }
  if (!(n1 > 0.0) || !(n2 > 0.0)) {
    throw PreconditionError("independence_battery: directions must be nonzero");
  }
  if (std::abs(dot) > kOrthonormalTolerance * std::sqrt(n1 * n2)) {
    throw PreconditionError("independence_battery: directions are not orthogonal");
  }

  const std::vector<double> t = rotated_samples(r, samples, seed);
  std::vector<double> x(samples), y(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    double vx = 0.0, vy = 0.0;
    for (unsigned a = 0; a < r.rank(); ++a) {
      vx += h1[a] * t[s * r.rank() + a];
      vy += h2[a] * t[s * r.rank() + a];
    }
    x[s] = vx / std::sqrt(n1);
    y[s] = vy / std::sqrt(n2);
  }
  RotationReport report{{}, seed, samples};
  independence_tests(report, "", x, y);
  return report;
}

RotationReport measure_preservation_battery(const AdaptedIsometry& r, std::size_t samples,
                                            std::uint64_t seed) {
  const unsigned k = r.rank();
  const std::vector<double> t = rotated_samples(r, samples, seed);
  std::vector<std::vector<double>> cols;
  for (unsigned a = 0; a < k; ++a) cols.push_back(column(t, k, a));

  RotationReport report{{}, seed, samples};
  const double cov_crit = kBatteryZ * std::sqrt(2.0 / static_cast<double>(samples));
  std::vector<double> prod(samples);
  for (unsigned a = 0; a < k; ++a) {
    for (unsigned b = a; b < k; ++b) {
      for (std::size_t s = 0; s < samples; ++s) prod[s] = cols[a][s] * cols[b][s];
      const double cov = estimate_mean(prod).mean;
      const double err = std::abs(cov - (a == b ? 1.0 : 0.0));
      report.tests.push_back({"cov[" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "]",
                              err, cov_crit, err <= cov_crit});
    }
  }
  for (unsigned a = 0; a < k; ++a) {
    const double d = stats::ks_statistic_normal(cols[a]);
    const double crit = stats::ks_critical_value(kBatteryAlpha, samples);
    report.tests.push_back({"ks[" + std::to_string(a + 1) + "]", d, crit, d <= crit});
  }
  // The first ten pairs in lexicographic order.
  unsigned pairs = 0;
  for (unsigned a = 0; a < k && pairs < 10; ++a) {
    for (unsigned b = a + 1; b < k && pairs < 10; ++b, ++pairs) {
      independence_tests(report,
                         "pair[" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "].",
                         cols[a], cols[b]);
    }
  }
  return report;
}

double isometry_check(const AdaptedIsometry& r, const SampleBatch& samples) {
  if (samples.dim != r.ambient_dim()) {
    throw DimensionMismatch("isometry_check: sample dimension does not match");
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(r.rank(), r.rank());
  double worst = 0.0;
  for (std::size_t s = 0; s < samples.rows; ++s) {
    const Eigen::MatrixXd m = r.matrix(samples.row(s));
    worst = std::max(worst, (m.transpose() * m - id).cwiseAbs().maxCoeff());
  }
  return worst;
}

double basis_invariance_check(const AdaptedIsometry& r, std::span<const double> basis_a,
                              std::span<const double> basis_b, const SampleBatch& samples) {
  const unsigned n = r.rank();
  const Eigen::MatrixXd ba = rows_matrix(basis_a, n, "first basis");
  const Eigen::MatrixXd bb = rows_matrix(basis_b, n, "second basis");
  if (samples.dim != r.ambient_dim()) {
    throw DimensionMismatch("basis_invariance_check: sample dimension does not match");
  }
  double worst = 0.0;
  for (std::size_t s = 0; s < samples.rows; ++s) {
    const std::vector<double> tv = apply_rotation(r, samples.row(s));
    const Eigen::Map<const Eigen::VectorXd> t(tv.data(), n);
    // sum_i delta(R h_i) h_i with delta(R h) = (h, T) pathwise.
    const Eigen::VectorXd sa = ba.transpose() * (ba * t);
    const Eigen::VectorXd sb = bb.transpose() * (bb * t);
    worst = std::max(worst, (sa - sb).norm());
  }
  return worst;
}

bool check_predictability_pathwise(const AdaptedIsometry& r, const SampleBatch& samples) {
  const unsigned n = r.ambient_dim();
  std::vector<double> moved(n);
  for (std::size_t s = 0; s < samples.rows; ++s) {
    const auto eta = samples.row(s);
    const Eigen::MatrixXd base = r.matrix(eta);
    for (unsigned j = 0; j < n; ++j) {
      std::copy(eta.begin(), eta.end(), moved.begin());
      for (unsigned i = j; i < n; ++i) moved[i] = -eta[i] + 1.0 + 0.37 * i;
      const Eigen::MatrixXd other = r.matrix(moved);
      if ((base.row(j) - other.row(j)).cwiseAbs().maxCoeff() > 1e-14) return false;
    }
  }
  return true;
}

Extraction extract_rotation(const std::vector<ChaosPoly>& t, const ExtractOptions& options) {
  if (t.empty()) throw PreconditionError("extract_rotation: no components");
  const unsigned n = t.front().dim();
  for (const auto& c : t) {
    if (c.dim() != n) throw DimensionMismatch("extract_rotation: components differ in n");
  }
  if (options.refine == 0) throw PreconditionError("extract_rotation: refine must be >= 1");
  const auto k = static_cast<unsigned>(t.size());

  RotationReport input{{}, options.seed, options.input_samples};
  if (options.check_input) {
    const SampleBatch batch = sample_batch(n, options.input_samples, options.seed,
                                           default_workers());
    std::vector<std::vector<double>> values(k, std::vector<double>(batch.rows));
    for (std::size_t s = 0; s < batch.rows; ++s) {
      for (unsigned a = 0; a < k; ++a) values[a][s] = evaluate(t[a], batch.row(s));
    }
    for (unsigned a = 0; a < k; ++a) {
      gaussian_tests(input, "T" + std::to_string(a + 1) + ".", values[a]);
    }
    for (unsigned a = 0; a < k; ++a) {
      for (unsigned b = a + 1; b < k; ++b) {
        independence_tests(input,
                           "T" + std::to_string(a + 1) + ",T" + std::to_string(b + 1) + ".",
                           values[a], values[b]);
      }
    }
    if (!input.passed()) {
      std::string failed;
      for (const auto& test : input.tests) {
        if (!test.pass) failed += (failed.empty() ? "" : ", ") + test.name;
      }
      throw PreconditionError("extract_rotation: inputs are not i.i.d. N(0,1): " + failed);
    }
  }

  std::vector<ChaosPoly> fine;
  for (const auto& c : t) fine.push_back(refine(c, options.refine));
  const unsigned fine_dim = n * options.refine;
  const VField v(fine_dim, std::move(fine));
  const ClarkResult clark = reconstruct(v);
  OperatorField integrands = clark.integrand.op();

  std::vector<double> residuals;
  for (unsigned a = 0; a < k; ++a) {
    residuals.push_back(l2_norm(v[a] - clark.reconstruction[a]));
  }
  double mean_dev = 0.0;
  for (unsigned a = 0; a < k; ++a) {
    for (unsigned b = 0; b < k; ++b) {
      const double g = field_inner(integrands.row(a), integrands.row(b));
      mean_dev = std::max(mean_dev, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  }

  AdaptedIsometry iso = AdaptedIsometry::from_fields(
      integrands, "extracted:refine=" + std::to_string(options.refine), options.seed);
  const SampleBatch dev_batch =
      sample_batch(fine_dim, options.deviation_samples, options.seed ^ 0x5bd1e995ULL);
  const double pathwise = isometry_check(iso, dev_batch);
  return Extraction{std::move(iso), std::move(integrands), std::move(input), pathwise,
                    mean_dev, std::move(residuals)};
}

}  // namespace wienerlab
