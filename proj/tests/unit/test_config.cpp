#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "wienerlab/harness/config.hpp"
#include "wienerlab/harness/report.hpp"

using namespace wienerlab;
using namespace wienerlab::harness;

namespace fs = std::filesystem;

TEST(Config, DefaultsAreValid) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.refine, (std::vector<unsigned>{1, 2, 4, 8}));
}

TEST(Config, JsonOverridesOnlyPresentKeys) {
  RunConfig base;
  base.cases = 7;
  const RunConfig c = config_from_json(
      R"({"n": 4, "refine": [1, 3], "tolerances": {"z": 5}, "output": "r.json"})", base);
  EXPECT_EQ(c.n, 4u);
  EXPECT_EQ(c.cases, 7u);
  EXPECT_EQ(c.refine, (std::vector<unsigned>{1, 3}));
  EXPECT_EQ(c.tolerances.z, 5.0);
  EXPECT_EQ(c.tolerances.exact, 1e-10);
  EXPECT_EQ(c.output, "r.json");
  EXPECT_EQ(c.d, base.d);
}

TEST(Config, RoundTrip) {
  RunConfig c;
  c.seed = 99;
  c.samples = 1234;
  c.tolerances.pathwise = 1e-8;
  const RunConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(nlohmann::json::parse(config_to_json(c))["N"], 1234);
}

TEST(Config, Rejections) {
  EXPECT_THROW(config_from_json(R"({"nn": 3})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"tolerances": {"loose": 1}})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"n": 0})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"n": -2})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"n": "six"})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"refine": []})").validate(), ConfigError);
  EXPECT_THROW(config_from_json(R"({"tolerances": {"exact": 0}})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"n": 64, "refine": [4]})").validate(), ConfigError);
  EXPECT_THROW(config_from_json("{"), ConfigError);
  EXPECT_THROW(config_from_json("[1]"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/wienerlab.json"), ConfigError);
}

TEST(Config, FactorList) {
  EXPECT_EQ(parse_factor_list("1,2,4,8"), (std::vector<unsigned>{1, 2, 4, 8}));
  EXPECT_EQ(parse_factor_list("3"), (std::vector<unsigned>{3}));
  for (const char* bad : {"", "1,,2", "0", "a", "1,2,"}) {
    EXPECT_THROW(parse_factor_list(bad), ConfigError) << bad;
  }
}

TEST(Report, JsonShape) {
  RunReport r;
  r.command = "verify";
  r.config.output = "/tmp/somewhere.json";
  r.suites.push_back({"duality", "duality", true, 3, 1e-16, 1e-10, ""});
  r.suites.push_back({"ito-isometry", "ito-isometry", false, 3, 1.0, 1e-10, "case 2"});
  const std::string text = report_to_json(r);
  ASSERT_EQ(text.back(), '\n');
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["schema"], kReportSchema);
  EXPECT_EQ(j["status"], "fail");
  EXPECT_FALSE(j["config"].contains("output"));
  EXPECT_EQ(j["suites"][1]["detail"], "case 2");
  EXPECT_FALSE(j["suites"][0].contains("detail"));
  EXPECT_TRUE(j["environment"].contains("generator"));
}

TEST(Report, AtomicWrite) {
  const fs::path dir = fs::temp_directory_path() / "wienerlab_atomic_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  write_file_atomic(path, "{}\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(content, "{}\n");
  EXPECT_FALSE(fs::exists(path + ".partial"));

  // Target is a directory: the rename fails and nothing is left behind.
  const fs::path blocked = dir / "blocked";
  fs::create_directories(blocked / "child");
  EXPECT_THROW(write_file_atomic(blocked.string(), "x"), Error);
  EXPECT_FALSE(fs::exists(blocked.string() + ".partial"));

  EXPECT_THROW(write_file_atomic((dir / "missing" / "out.json").string(), "x"), Error);
  EXPECT_FALSE(fs::exists(dir / "missing"));
  fs::remove_all(dir);
}
