#include "wienerlab/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wienerlab/chaos.hpp"

namespace wienerlab::harness {

namespace {

using nlohmann::json;

template <typename T>
T positive_int(const json& j, const char* key) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ConfigError(std::string("config: '") + key + "' must be an integer");
  }
  const auto v = j.get<long long>();
  if (v <= 0) throw ConfigError(std::string("config: '") + key + "' must be positive");
  return static_cast<T>(v);
}

double positive_real(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0)) throw ConfigError(std::string("config: '") + key + "' must be > 0");
  return v;
}

}  // namespace

void RunConfig::validate() const {
  if (n == 0 || n > kDimensionCap) {
    throw ConfigError("config: n must be in 1.." + std::to_string(kDimensionCap));
  }
  if (d == 0) throw ConfigError("config: d must be positive");
  if (degree_cap == 0) throw ConfigError("config: degree_cap must be positive");
  if (refine.empty()) throw ConfigError("config: refine must list at least one factor");
  for (unsigned m : refine) {
    if (m == 0) throw ConfigError("config: refine factors must be positive");
    if (static_cast<unsigned long long>(m) * n > kDimensionCap) {
      throw ConfigError("config: refined grid n*m exceeds " + std::to_string(kDimensionCap));
    }
  }
  if (samples == 0) throw ConfigError("config: N must be positive");
  if (cases == 0) throw ConfigError("config: cases must be positive");
  if (!(tolerances.exact > 0.0) || !(tolerances.pathwise > 0.0) || !(tolerances.z > 0.0)) {
    throw ConfigError("config: tolerances must be > 0");
  }
}

RunConfig config_from_json(const std::string& text, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "n") {
      base.n = positive_int<unsigned>(value, "n");
    } else if (key == "d") {
      base.d = positive_int<unsigned>(value, "d");
    } else if (key == "degree_cap") {
      base.degree_cap = positive_int<unsigned>(value, "degree_cap");
    } else if (key == "refine") {
      if (!value.is_array()) throw ConfigError("config: 'refine' must be an array");
      base.refine.clear();
      for (const auto& f : value) base.refine.push_back(positive_int<unsigned>(f, "refine"));
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer()) {
        throw ConfigError("config: 'seed' must be an integer");
      }
      if (value.is_number_integer() && value.get<long long>() < 0) {
        throw ConfigError("config: 'seed' must be non-negative");
      }
      base.seed = value.get<std::uint64_t>();
    } else if (key == "N") {
      base.samples = positive_int<std::size_t>(value, "N");
    } else if (key == "cases") {
      base.cases = positive_int<unsigned>(value, "cases");
    } else if (key == "tolerances") {
      if (!value.is_object()) throw ConfigError("config: 'tolerances' must be an object");
      for (const auto& [tk, tv] : value.items()) {
        if (tk == "exact") {
          base.tolerances.exact = positive_real(tv, "tolerances.exact");
        } else if (tk == "pathwise") {
          base.tolerances.pathwise = positive_real(tv, "tolerances.pathwise");
        } else if (tk == "z") {
          base.tolerances.z = positive_real(tv, "tolerances.z");
        } else {
          throw ConfigError("config: unknown key 'tolerances." + tk + "'");
        }
      }
    } else if (key == "output") {
      if (!value.is_string()) throw ConfigError("config: 'output' must be a string");
      base.output = value.get<std::string>();
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str(), std::move(base));
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["d"] = c.d;
  j["degree_cap"] = c.degree_cap;
  j["refine"] = c.refine;
  j["seed"] = c.seed;
  j["N"] = c.samples;
  j["cases"] = c.cases;
  j["tolerances"] = {{"exact", c.tolerances.exact},
                     {"pathwise", c.tolerances.pathwise},
                     {"z", c.tolerances.z}};
  j["output"] = c.output;
  return j.dump(2);
}

std::vector<unsigned> parse_factor_list(const std::string& text) {
  std::vector<unsigned> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item(text.data() + start, comma - start);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || value == 0) {
      throw ConfigError("refine: '" + std::string(item) + "' is not a positive integer");
    }
    out.push_back(value);
    start = comma + 1;
  }
  return out;
}

}  // namespace wienerlab::harness
