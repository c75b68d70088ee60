#pragma once

// Property suites behind `verify`. Each suite draws its own instances from a
// seed derived from (run seed, suite name), so suites are independent of one
// another and of the order they run in.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wienerlab/chaos.hpp"
#include "wienerlab/harness/config.hpp"
#include "wienerlab/harness/report.hpp"

namespace wienerlab::harness {

struct SuiteParams {
  unsigned max_n = 6;
  unsigned max_d = 3;
  unsigned max_degree = 4;
  unsigned cases = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-10;
  unsigned degree_cap = kDefaultDegreeCap;
  std::vector<unsigned> refine = {1, 2, 4, 8};
  std::size_t samples = 100000;
  double z = 4.0;
};

SuiteResult suite_duality(const SuiteParams& p);
SuiteResult suite_divergence_pairing(const SuiteParams& p);
SuiteResult suite_weak_product_rule(const SuiteParams& p);
SuiteResult suite_skew_divergence_free(const SuiteParams& p);
SuiteResult suite_identity_divergence(const SuiteParams& p);
SuiteResult suite_divergence_growth(const SuiteParams& p);
SuiteResult suite_number_operator(const SuiteParams& p);
SuiteResult suite_ito_isometry(const SuiteParams& p);
SuiteResult suite_operator_isometry(const SuiteParams& p);
SuiteResult suite_weak_orthogonality(const SuiteParams& p);
SuiteResult suite_divergence_free_uniqueness(const SuiteParams& p);
SuiteResult suite_clark_ocone(const SuiteParams& p);
SuiteResult suite_clark_uniqueness(const SuiteParams& p);
SuiteResult suite_refinement_closed_form(const SuiteParams& p);
SuiteResult suite_refinement_monotone(const SuiteParams& p);
SuiteResult suite_minimal_energy(const SuiteParams& p);
SuiteResult suite_energy_order(const SuiteParams& p);
SuiteResult suite_energy_coincidence(const SuiteParams& p);
SuiteResult suite_worked_energy_pair(const SuiteParams& p);
SuiteResult suite_monte_carlo(const SuiteParams& p);

/// Per-suite seed: the run seed mixed with a hash of the suite name.
std::uint64_t suite_seed(std::uint64_t run_seed, const std::string& name);

/// Every suite above in a fixed order.
RunReport run_verify(const RunConfig& config);

}  // namespace wienerlab::harness
