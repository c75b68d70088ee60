// wienerlab command-line driver.
//
// Exit codes: 0 pass, 1 a check failed, 2 usage error, 3 internal error.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wienerlab/clark_ocone.hpp"
#include "wienerlab/harness/config.hpp"
#include "wienerlab/harness/dsl.hpp"
#include "wienerlab/harness/instances.hpp"
#include "wienerlab/harness/report.hpp"
#include "wienerlab/harness/suites.hpp"
#include "wienerlab/rotations.hpp"
#include "wienerlab/version.hpp"

namespace {

using namespace wienerlab;
using harness::ConfigError;
using json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    harness::write_file_atomic(path, content);
  }
}

std::string read_functional(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return arg;
}

struct VerifyArgs {
  std::string config_path;
  unsigned n = 0, d = 0, cases = 0, degree_cap = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::string refine;
  std::string output;
};

int run_verify(const VerifyArgs& a, const CLI::App& cmd) {
  harness::RunConfig config;
  if (!a.config_path.empty()) config = harness::load_config(a.config_path);
  if (cmd.count("--n")) config.n = a.n;
  if (cmd.count("--d")) config.d = a.d;
  if (cmd.count("--cases")) config.cases = a.cases;
  if (cmd.count("--degree-cap")) config.degree_cap = a.degree_cap;
  if (cmd.count("--seed")) config.seed = a.seed;
  if (cmd.count("--N")) config.samples = a.samples;
  if (cmd.count("--refine")) config.refine = harness::parse_factor_list(a.refine);
  if (cmd.count("--output")) config.output = a.output;
  config.validate();

  const harness::RunReport report = harness::run_verify(config);
  for (const auto& s : report.suites) {
    std::cerr << (s.pass ? "PASS " : "FAIL ") << s.name << "  max_residual=" << s.max_residual
              << " tol=" << s.tolerance << "\n";
  }
  emit(config.output, harness::report_to_json(report));
  return report.passed() ? kExitPass : kExitFail;
}

struct RepresentArgs {
  std::string functional;
  unsigned n = 0;
  unsigned degree_cap = kDefaultDegreeCap;
  std::string refine = "1";
  std::string output;
  std::string csv;
};

int run_represent(const RepresentArgs& a) {
  if (a.n == 0 || a.n > kDimensionCap) throw ConfigError("--n must be in 1..128");
  const std::vector<unsigned> factors = harness::parse_factor_list(a.refine);
  for (unsigned m : factors) {
    if (static_cast<unsigned long long>(m) * a.n > kDimensionCap) {
      throw ConfigError("refined grid n*m exceeds 128");
    }
  }
  const dsl::Expr expr = dsl::parse(read_functional(a.functional));
  const VField v = dsl::lower_vector(expr, a.n, a.degree_cap);

  const ClarkResult clark = reconstruct(v);
  const auto table = refine_and_reconstruct(v, factors);

  json out;
  out["schema"] = "wienerlab.represent/1";
  out["functional"] = dsl::print(expr);
  out["n"] = a.n;
  out["degree_cap"] = a.degree_cap;
  out["clark"] = json::parse(clark_result_to_json(clark));
  auto rows = json::array();
  for (const auto& r : table) rows.push_back({{"m", r.factor}, {"residual", r.residual}});
  out["refinement"] = std::move(rows);
  auto energy = json::array();
  for (unsigned c = 0; c < v.target_dim(); ++c) {
    const EnergyComparison cmp = compare_energies(v[c]);
    energy.push_back({{"component", c + 1},
                      {"adapted_energy", cmp.adapted_energy},
                      {"exact_energy", cmp.exact_energy},
                      {"coincide", cmp.coincide},
                      {"adapted_represents", cmp.adapted_represents}});
  }
  out["energy"] = std::move(energy);

  emit(a.output, out.dump(2) + "\n");
  if (!a.csv.empty()) harness::write_file_atomic(a.csv, refinement_to_csv(table));
  return kExitPass;
}

struct RotateArgs {
  unsigned n = 4;
  std::string construction = "givens";
  std::size_t samples = 200000;
  std::uint64_t seed = 1;
  std::string output;
};

int run_rotate(const RotateArgs& a) {
  if (a.n == 0 || a.n > kDimensionCap) throw ConfigError("--n must be in 1..128");
  if (a.samples < 2) throw ConfigError("--N must be at least 2");
  const AngleSpec spec = parse_angle_spec(a.construction);
  const AdaptedIsometry r = build_sequential_isometry(a.n, a.seed, spec);

  RotationReport report{{}, a.seed, a.samples};
  const SampleBatch path = sample_batch(a.n, 1000, a.seed + 1);
  const double iso = isometry_check(r, path);
  report.tests.push_back({"isometry", iso, 1e-9, iso <= 1e-9});
  const bool predictable = check_predictability_pathwise(r, path);
  report.tests.push_back({"predictable", predictable ? 0.0 : 1.0, 0.0, predictable});

  std::vector<double> identity(static_cast<std::size_t>(a.n) * a.n, 0.0);
  for (unsigned i = 0; i < a.n; ++i) identity[i * a.n + i] = 1.0;
  harness::Rng rng(a.seed);
  const double gap = basis_invariance_check(r, identity, harness::random_onb(rng, a.n), path);
  report.tests.push_back({"basis_invariance", gap, 1e-9, gap <= 1e-9});

  auto tag = [](RotationReport part, const std::string& prefix) {
    for (auto& t : part.tests) t.name = prefix + t.name;
    return part;
  };
  for (unsigned i = 0; i < a.n; ++i) {
    std::vector<double> h(a.n, 0.0);
    h[i] = 1.0;
    report.append(tag(gaussianity_battery(r, h, a.samples, a.seed + 10 + i),
                      "gaussian[e" + std::to_string(i + 1) + "]."));
  }
  if (a.n >= 2) {
    std::vector<double> h1(a.n, 0.0), h2(a.n, 0.0);
    h1[0] = 1.0;
    h2[1] = 1.0;
    report.append(tag(independence_battery(r, h1, h2, a.samples, a.seed + 5),
                      "independence[e1,e2]."));
  }
  report.append(tag(measure_preservation_battery(r, a.samples, a.seed + 7), "measure."));

  std::size_t failed = 0;
  for (const auto& t : report.tests) failed += t.pass ? 0 : 1;
  std::cerr << (failed == 0 ? "PASS" : "FAIL") << " rotate " << to_string(spec) << ": "
            << report.tests.size() - failed << "/" << report.tests.size() << " tests pass\n";
  emit(a.output, report_to_json(report) + "\n");
  return failed == 0 ? kExitPass : kExitFail;
}

template <typename F>
double time_ms(unsigned reps, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  for (unsigned r = 0; r < reps; ++r) f();
  const std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start;
  return d.count() / reps;
}

int run_bench(const std::string& suite, unsigned reps) {
  if (suite != "all" && suite != "hermite_product" && suite != "refine") {
    throw ConfigError("unknown bench suite '" + suite + "' (hermite_product, refine, all)");
  }
  if (reps == 0) throw ConfigError("--reps must be positive");
  json out;
  out["schema"] = "wienerlab.bench/1";
  auto rows = json::array();
  harness::Rng rng(7);
  if (suite == "all" || suite == "hermite_product") {
    for (unsigned n : {2u, 4u, 8u}) {
      const harness::PolyShape s{n, 4, 8, kDefaultDegreeCap};
      const ChaosPoly p = harness::random_poly(rng, s);
      const ChaosPoly q = harness::random_poly(rng, s);
      volatile std::size_t sink = 0;
      const double ms = time_ms(reps, [&] { sink = sink + hermite_product(p, q).size(); });
      rows.push_back({{"kernel", "hermite_product"}, {"n", n}, {"terms", p.size() + q.size()},
                      {"ms_per_call", ms}});
    }
  }
  if (suite == "all" || suite == "refine") {
    for (unsigned m : {2u, 4u, 8u}) {
      const ChaosPoly p = ChaosPoly::hermite(2, 1, 3) + ChaosPoly::hermite(2, 2, 2);
      volatile std::size_t sink = 0;
      const double ms = time_ms(reps, [&] { sink = sink + refine(p, m).size(); });
      rows.push_back({{"kernel", "refine"}, {"m", m}, {"ms_per_call", ms}});
    }
  }
  out["timings"] = std::move(rows);
  std::cout << out.dump(2) << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wienerlab: Malliavin calculus on a discretized Wiener space"};
  app.set_version_flag("--version", std::string(wienerlab::kVersion));
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the exact-identity and property suites");
  verify->add_option("--config", va.config_path, "JSON config file")->check(CLI::ExistingFile);
  verify->add_option("--n", va.n, "largest grid size");
  verify->add_option("--d", va.d, "largest target dimension");
  verify->add_option("--cases", va.cases, "randomized instances per suite");
  verify->add_option("--degree-cap", va.degree_cap, "degree cap");
  verify->add_option("--seed", va.seed, "run seed");
  verify->add_option("--N", va.samples, "Monte Carlo sample count");
  verify->add_option("--refine", va.refine, "refinement factors, e.g. 1,2,4,8");
  verify->add_option("--output,-o", va.output, "report path (stdout if omitted)");

  RepresentArgs ra;
  auto* represent = app.add_subcommand("represent", "Clark integrand, residuals and energies");
  represent->add_option("--functional,-f", ra.functional, "DSL expression or file")->required();
  represent->add_option("--n", ra.n, "grid size")->required();
  represent->add_option("--refine", ra.refine, "refinement factors, e.g. 1,2,4,8");
  represent->add_option("--degree-cap", ra.degree_cap, "degree cap");
  represent->add_option("--output,-o", ra.output, "JSON path (stdout if omitted)");
  represent->add_option("--csv", ra.csv, "refinement table CSV path");

  RotateArgs rot;
  auto* rotate = app.add_subcommand("rotate", "build a rotation and run the batteries");
  rotate->add_option("--n", rot.n, "grid size")->required();
  rotate->add_option("--construction", rot.construction,
                     "identity | sign | constant | givens[:amp] | scaled[:col] | "
                     "correlated[:col] | surrogate");
  rotate->add_option("--N", rot.samples, "battery sample count");
  rotate->add_option("--seed", rot.seed, "seed");
  rotate->add_option("--output,-o", rot.output, "report path (stdout if omitted)");

  std::string bench_suite = "all";
  unsigned bench_reps = 50;
  auto* bench = app.add_subcommand("bench", "time algebra kernels");
  bench->add_option("--suite", bench_suite, "hermite_product | refine | all");
  bench->add_option("--reps", bench_reps, "repetitions per kernel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) return run_verify(va, *verify);
    if (*represent) return run_represent(ra);
    if (*rotate) return run_rotate(rot);
    if (*bench) return run_bench(bench_suite, bench_reps);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dsl::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dsl::SemanticError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
