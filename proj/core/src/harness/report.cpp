#include "wienerlab/harness/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "wienerlab/version.hpp"
#include "wienerlab/wiener_space.hpp"

namespace wienerlab::harness {

bool RunReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass; });
}

std::string report_to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = report.command;
  j["status"] = report.passed() ? "pass" : "fail";
  j["environment"] = {{"version", kVersion},
                      {"generator", kGeneratorId},
                      {"compiler", kCompiler}};
  auto config = nlohmann::ordered_json::parse(config_to_json(report.config));
  config.erase("output");  // where the report lands does not change its content
  j["config"] = std::move(config);
  auto suites = nlohmann::ordered_json::array();
  for (const auto& s : report.suites) {
    nlohmann::ordered_json e;
    e["name"] = s.name;
    e["identity"] = s.identity;
    e["status"] = s.pass ? "pass" : "fail";
    e["cases"] = s.cases;
    e["max_residual"] = s.max_residual;
    e["tolerance"] = s.tolerance;
    if (!s.detail.empty()) e["detail"] = s.detail;
    suites.push_back(std::move(e));
  }
  j["suites"] = std::move(suites);
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw Error("cannot move report into '" + path + "': " + ec.message());
  }
}

}  // namespace wienerlab::harness
