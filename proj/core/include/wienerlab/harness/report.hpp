#pragma once

#include <string>
#include <vector>

#include "wienerlab/harness/config.hpp"

namespace wienerlab::harness {

inline constexpr const char* kReportSchema = "wienerlab.run-report/1";

struct SuiteResult {
  std::string name;
  /// The identity the suite checks, in plain notation.
  std::string identity;
  bool pass = false;
  unsigned cases = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct RunReport {
  std::string command;
  RunConfig config;
  std::vector<SuiteResult> suites;

  bool passed() const;
};

/// Schema-versioned and free of timestamps, so identical runs give
/// identical bytes.
std::string report_to_json(const RunReport& report);

/// Writes to a sibling temporary file and renames it over `path`. On failure
/// nothing is left at `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace wienerlab::harness
