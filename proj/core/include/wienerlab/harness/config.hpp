#pragma once

// Run configuration. A JSON file supplies defaults; command-line flags
// override individual keys.
//
//   {
//     "n": 6,                    largest grid size drawn by the suites
//     "d": 3,                    largest target dimension
//     "degree_cap": 8,
//     "refine": [1, 2, 4, 8],
//     "seed": 20240611,
//     "N": 100000,               Monte Carlo / battery sample count
//     "cases": 100,              randomized instances per suite
//     "tolerances": {"exact": 1e-10, "pathwise": 1e-9, "z": 4},
//     "output": "report.json"
//   }
//
// Unknown keys are rejected.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wienerlab/errors.hpp"

namespace wienerlab::harness {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Tolerances {
  double exact = 1e-10;
  double pathwise = 1e-9;
  double z = 4.0;
};

struct RunConfig {
  unsigned n = 6;
  unsigned d = 3;
  unsigned degree_cap = 8;
  std::vector<unsigned> refine = {1, 2, 4, 8};
  std::uint64_t seed = 20240611;
  std::size_t samples = 100000;
  unsigned cases = 100;
  Tolerances tolerances;
  std::string output;

  /// Throws ConfigError.
  void validate() const;
};

/// Applies the keys present in `json` on top of `base`.
RunConfig config_from_json(const std::string& json, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string config_to_json(const RunConfig& config);

/// "1,2,4,8" -> {1, 2, 4, 8}.
std::vector<unsigned> parse_factor_list(const std::string& text);

}  // namespace wienerlab::harness
