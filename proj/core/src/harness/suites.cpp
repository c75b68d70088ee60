#include "wienerlab/harness/suites.hpp"

#include <algorithm>
#include <cmath>

#include "wienerlab/clark_ocone.hpp"
#include "wienerlab/harness/instances.hpp"
#include "wienerlab/wiener_space.hpp"

namespace wienerlab::harness {

namespace {

class Tally {
 public:
  Tally(std::string name, std::string identity, double tolerance)
      : result_{std::move(name), std::move(identity), true, 0, 0.0, tolerance, {}} {}

  void add(double residual) {
    ++result_.cases;
    if (!(residual <= result_.tolerance)) result_.pass = false;
    result_.max_residual = std::max(result_.max_residual, residual);
    if (std::isnan(residual)) result_.max_residual = residual;
  }
  void add_flag(bool ok) { add(ok ? 0.0 : 1.0); }
  void note(std::string detail) { result_.detail = std::move(detail); }
  SuiteResult finish() && { return std::move(result_); }

 private:
  SuiteResult result_;
};

Rng rng_for(const SuiteParams& p, const char* name) { return Rng(suite_seed(p.seed, name)); }

PolyShape shape_for(Rng& rng, const SuiteParams& p, unsigned max_degree) {
  PolyShape s;
  s.n = uniform_int(rng, 1, p.max_n);
  s.max_degree = max_degree;
  s.max_terms = 5;
  s.degree_cap = p.degree_cap;
  return s;
}

ChaosPoly centered(const ChaosPoly& p) {
  return p - ChaosPoly::constant(p.dim(), expectation(p), p.degree_cap());
}

}  // namespace

std::uint64_t suite_seed(std::uint64_t run_seed, const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  SplitMix64 mix(run_seed ^ h);
  return mix.next();
}

SuiteResult suite_duality(const SuiteParams& p) {
  Tally t("duality", "E<<K, grad F>> = E<F, delta K>", p.tolerance);
  Rng rng = rng_for(p, "duality");
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const unsigned d = uniform_int(rng, 1, p.max_d);
    t.add(check_duality(random_operator(rng, d, s), random_vfield(rng, d, s)));
  }
  return std::move(t).finish();
}

SuiteResult suite_divergence_pairing(const SuiteParams& p) {
  Tally t("divergence-pairing", "delta(K^T l) = <l, delta K>", p.tolerance);
  Rng rng = rng_for(p, "divergence-pairing");
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const unsigned d = uniform_int(rng, 1, p.max_d);
    const OperatorField k = random_operator(rng, d, s);
    std::vector<double> l(d);
    for (auto& x : l) x = static_cast<double>(uniform_int(rng, 0, 2000)) / 1000.0 - 1.0;
    const ChaosPoly lhs = divergence_h(k.transpose_apply(VField::constant(s.n, l, s.degree_cap)));
    const VField div = divergence_op(k);
    ChaosPoly rhs(s.n, s.degree_cap);
    for (unsigned a = 0; a < d; ++a) rhs = rhs + l[a] * div[a];
    t.add(l2_norm(lhs - rhs));
  }
  return std::move(t).finish();
}

SuiteResult suite_weak_product_rule(const SuiteParams& p) {
  Tally t("weak-product-rule", "delta(K^T F) = <F, delta K> - <<K, grad F>>", p.tolerance);
  Rng rng = rng_for(p, "weak-product-rule");
  // deg delta(K^T F) = deg K + deg F + 1 must stay within the cap.
  const unsigned degree = std::min(p.max_degree, (p.degree_cap - 1) / 2);
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, degree);
    const unsigned d = uniform_int(rng, 1, p.max_d);
    t.add(check_weakb(random_operator(rng, d, s), random_vfield(rng, d, s)));
  }
  t.note("instance degree <= " + std::to_string(degree));
  return std::move(t).finish();
}

SuiteResult suite_skew_divergence_free(const SuiteParams& p) {
  Tally t("skew-divergence-free", "delta(A w) = 0 for skew-symmetric A", 0.0);
  Rng rng = rng_for(p, "skew-divergence-free");
  for (unsigned c = 0; c < p.cases; ++c) {
    const unsigned n = uniform_int(rng, 1, 8);
    const HField u = skew_linear_field(n, random_skew(rng, n), p.degree_cap);
    t.add(l2_norm(divergence_h(u)));
  }
  return std::move(t).finish();
}

SuiteResult suite_identity_divergence(const SuiteParams& p) {
  Tally t("identity-divergence", "delta(1_H)(w) = w", 0.0);
  for (unsigned n = 1; n <= std::max(p.max_n, 8u); ++n) {
    const VField div = divergence_op(OperatorField::identity(n, p.degree_cap));
    double worst = 0.0;
    for (unsigned a = 0; a < n; ++a) {
      worst = std::max(worst, l2_norm(div[a] - ChaosPoly::coordinate(n, a + 1, p.degree_cap)));
    }
    t.add(worst);
  }
  return std::move(t).finish();
}

SuiteResult suite_divergence_growth(const SuiteParams&) {
  Tally t("divergence-growth", "||delta(sum_i eta_i e_i)|| = sqrt(2n)", 1e-12);
  std::vector<unsigned> dims;
  for (unsigned n = 1; n <= 64; n *= 2) dims.push_back(n);
  for (const auto& row : identity_divergence_growth(dims)) {
    t.add(std::abs(row.norm - row.expected));
  }
  return std::move(t).finish();
}

SuiteResult suite_number_operator(const SuiteParams& p) {
  Tally t("number-operator", "delta grad F = L F", p.tolerance);
  Rng rng = rng_for(p, "number-operator");
  for (unsigned c = 0; c < p.cases; ++c) {
    const ChaosPoly f = random_centered_poly(rng, shape_for(rng, p, p.max_degree));
    t.add(l2_norm(divergence_h(gradient_scalar(f)) - ou_apply(f)));
  }
  return std::move(t).finish();
}

SuiteResult suite_ito_isometry(const SuiteParams& p) {
  Tally t("ito-isometry", "E delta(u) delta(v) = E(u, v)_H for predictable u, v", p.tolerance);
  Rng rng = rng_for(p, "ito-isometry");
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const PredictableHField u = random_predictable(rng, s);
    const PredictableHField v = random_predictable(rng, s);
    t.add(check_ito_isometry(u, v));
  }
  return std::move(t).finish();
}

SuiteResult suite_operator_isometry(const SuiteParams& p) {
  Tally t("operator-isometry", "E<delta D, delta K> = E<<K, D>> for weakly adapted K",
          p.tolerance);
  Rng rng = rng_for(p, "operator-isometry");
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const unsigned d = uniform_int(rng, 1, p.max_d);
    const WeaklyAdaptedOperator k = random_weakly_adapted(rng, d, s);
    const FiniteRankOperator q = random_finite_rank(rng, d, uniform_int(rng, 1, 3), s);
    t.add(check_operator_isometry(k, q));
  }
  return std::move(t).finish();
}

SuiteResult suite_weak_orthogonality(const SuiteParams& p) {
  Tally t("weak-orthogonality", "E<<K, Q>> = E<<Pi K, Q>> for adapted finite-rank Q",
          p.tolerance);
  Rng rng = rng_for(p, "weak-orthogonality");
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const unsigned d = uniform_int(rng, 1, p.max_d);
    const OperatorField k = random_operator(rng, d, s);
    const FiniteRankOperator q = random_finite_rank(rng, d, uniform_int(rng, 1, 3), s);
    t.add(check_weak_orthogonality(k, q));
  }
  return std::move(t).finish();
}

SuiteResult suite_divergence_free_uniqueness(const SuiteParams& p) {
  Tally t("divergence-free-uniqueness", "delta K = 0 and K weakly adapted imply K = 0", 0.0);
  Rng rng = rng_for(p, "divergence-free-uniqueness");
  t.add_flag(check_divergence_free_uniqueness(
      WeaklyAdaptedOperator(OperatorField::zero(2, 3, p.degree_cap))));
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const unsigned d = uniform_int(rng, 1, p.max_d);
    t.add_flag(check_divergence_free_uniqueness(random_weakly_adapted(rng, d, s)));
  }
  return std::move(t).finish();
}

SuiteResult suite_clark_ocone(const SuiteParams& p) {
  Tally t("clark-ocone", "v = E v + delta(Pi grad v) on the representable class",
          p.tolerance);
  Rng rng = rng_for(p, "clark-ocone");
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const RepresentableInstance inst = random_representable(rng, uniform_int(rng, 1, p.max_d), s);
    t.add(reconstruct(inst.v).residual_l2);
  }
  return std::move(t).finish();
}

SuiteResult suite_clark_uniqueness(const SuiteParams& p) {
  Tally t("clark-uniqueness", "a weakly adapted integrand of v - E v is unique", 0.0);
  Rng rng = rng_for(p, "clark-uniqueness");
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const RepresentableInstance inst = random_representable(rng, uniform_int(rng, 1, p.max_d), s);
    t.add_flag(check_uniqueness(inst.v, inst.integrand));
  }
  return std::move(t).finish();
}

SuiteResult suite_refinement_closed_form(const SuiteParams& p) {
  Tally t("refinement-closed-form", "residual of He_2(eta_1) at factor m is sqrt(2/m)",
          p.tolerance);
  const VField v(1, {ChaosPoly::hermite(1, 1, 2, p.degree_cap)});
  for (const auto& row : refine_and_reconstruct(v, p.refine)) {
    t.add(std::abs(row.residual - std::sqrt(2.0 / row.factor)));
  }
  return std::move(t).finish();
}

SuiteResult suite_refinement_monotone(const SuiteParams& p) {
  Tally t("refinement-monotone", "residual is non-increasing along nested refinements",
          p.tolerance);
  Rng rng = rng_for(p, "refinement-monotone");
  std::vector<unsigned> factors = p.refine;
  std::sort(factors.begin(), factors.end());
  const unsigned cases = std::min(p.cases, 20u);
  for (unsigned c = 0; c < cases; ++c) {
    PolyShape s = shape_for(rng, p, 3);
    s.n = std::min(s.n, 4u);
    const VField v(s.n, {random_poly(rng, s)});
    const auto table = refine_and_reconstruct(v, factors);
    double worst = 0.0;
    for (std::size_t i = 1; i < table.size(); ++i) {
      // Only nested grids (each factor divides the next) are comparable.
      if (table[i].factor % table[i - 1].factor != 0) continue;
      worst = std::max(worst, table[i].residual - table[i - 1].residual);
    }
    t.add(worst);
  }
  return std::move(t).finish();
}

SuiteResult suite_minimal_energy(const SuiteParams& p) {
  Tally t("minimal-energy", "delta(grad L^-1 (phi - E phi)) = phi - E phi", p.tolerance);
  Rng rng = rng_for(p, "minimal-energy");
  for (unsigned c = 0; c < p.cases; ++c) {
    const ChaosPoly phi = random_poly(rng, shape_for(rng, p, p.max_degree));
    t.add(l2_norm(divergence_h(minimal_energy_integrand(phi)) - centered(phi)));
  }
  return std::move(t).finish();
}

SuiteResult suite_energy_order(const SuiteParams& p) {
  Tally t("energy-order",
          "E|grad L^-1 phi|^2 <= E|Pi grad phi|^2 + ||phi - E phi - delta(Pi grad phi)||^2",
          p.tolerance);
  Rng rng = rng_for(p, "energy-order");
  for (unsigned c = 0; c < p.cases; ++c) {
    const PolyShape s = shape_for(rng, p, p.max_degree);
    const ChaosPoly phi = c % 2 == 0 ? random_representable(rng, 1, s).v[0] : random_poly(rng, s);
    const EnergyComparison cmp = compare_energies(phi);
    const ChaosPoly gap =
        centered(phi) - divergence_h(project_adapted(gradient_scalar(phi)).field());
    const double slack = l2_inner(gap, gap);
    t.add(std::max(0.0, cmp.exact_energy - cmp.adapted_energy - slack));
  }
  t.note("even cases are representable (no slack), odd cases are general");
  return std::move(t).finish();
}

SuiteResult suite_energy_coincidence(const SuiteParams& p) {
  Tally t("energy-coincidence", "adapted and minimal integrands coincide on the first chaos",
          p.tolerance);
  Rng rng = rng_for(p, "energy-coincidence");
  for (unsigned c = 0; c < p.cases; ++c) {
    const unsigned n = uniform_int(rng, 1, p.max_n);
    if (c % 2 == 0) {
      const EnergyComparison cmp = compare_energies(random_first_chaos(rng, n, p.degree_cap));
      t.add(cmp.coincide ? std::abs(cmp.exact_energy - cmp.adapted_energy) : 1.0);
    } else {
      // A guaranteed second-chaos term keeps the input off the first chaos.
      PolyShape s{n, p.max_degree, 4, p.degree_cap};
      const ChaosPoly phi = random_poly(rng, s) + ChaosPoly::hermite(n, 1, 2, p.degree_cap);
      t.add_flag(!compare_energies(phi).coincide);
    }
  }
  return std::move(t).finish();
}

SuiteResult suite_worked_energy_pair(const SuiteParams& p) {
  Tally t("worked-energy-pair", "phi = eta_1 eta_2 gives energies (1, 1/2)", p.tolerance);
  const ChaosPoly phi = ChaosPoly::monomial(2, MultiIndex::from_entries({{1, 1}, {2, 1}}), 1.0,
                                            p.degree_cap);
  const EnergyComparison cmp = compare_energies(phi);
  t.add(std::abs(cmp.adapted_energy - 1.0));
  t.add(std::abs(cmp.exact_energy - 0.5));
  return std::move(t).finish();
}

SuiteResult suite_monte_carlo(const SuiteParams& p) {
  Tally t("monte-carlo", "sampled means agree with exact expectations (z-score)", p.z);
  Rng rng = rng_for(p, "monte-carlo");
  const unsigned cases = std::min(p.cases, 50u);
  for (unsigned c = 0; c < cases; ++c) {
    const ChaosPoly f = random_poly(rng, shape_for(rng, p, p.max_degree));
    const SampleBatch batch = sample_batch(f.dim(), p.samples, rng());
    const MonteCarloEstimate est = mc_estimate(f, batch);
    const double gap = std::abs(est.mean - expectation(f));
    // Constant functionals have zero spread; rounding in the mean is all that is left.
    t.add(gap / std::max(est.std_error, 1e-12));
  }
  t.note("N = " + std::to_string(p.samples));
  return std::move(t).finish();
}

RunReport run_verify(const RunConfig& config) {
  config.validate();
  SuiteParams p;
  p.max_n = config.n;
  p.max_d = config.d;
  p.cases = config.cases;
  p.seed = config.seed;
  p.tolerance = config.tolerances.exact;
  p.degree_cap = config.degree_cap;
  p.max_degree = std::min(4u, config.degree_cap);
  p.refine = config.refine;
  p.samples = config.samples;
  p.z = config.tolerances.z;

  using Suite = SuiteResult (*)(const SuiteParams&);
  const Suite suites[] = {
      suite_duality,           suite_divergence_pairing,
      suite_weak_product_rule, suite_skew_divergence_free,
      suite_identity_divergence, suite_divergence_growth,
      suite_number_operator,   suite_ito_isometry,
      suite_operator_isometry, suite_weak_orthogonality,
      suite_divergence_free_uniqueness, suite_clark_ocone,
      suite_clark_uniqueness,  suite_refinement_closed_form,
      suite_refinement_monotone, suite_minimal_energy,
      suite_energy_order,      suite_energy_coincidence,
      suite_worked_energy_pair, suite_monte_carlo,
  };
  RunReport report{"verify", config, {}};
  for (Suite s : suites) report.suites.push_back(s(p));
  return report;
}

}  // namespace wienerlab::harness
