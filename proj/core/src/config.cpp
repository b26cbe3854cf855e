// SPDX-License-Identifier: Apache-2.0
#include "nudoa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nudoa/errors.hpp"

namespace nudoa {

using nlohmann::json;

namespace {

// Reads fields off a JSON object and collects every problem instead of
// stopping at the first.
class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& problems) : problems_(problems) {}

  void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    const std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
      if (!known.contains(key)) problems_.push_back(where + key + ": unknown key");
    }
  }

  const json* object(const json& parent, const char* key, const std::string& where, bool required) {
    if (!parent.contains(key)) {
      if (required) problems_.push_back(where + key + ": required");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      problems_.push_back(where + key + ": expected an object");
      return nullptr;
    }
    return &v;
  }

  template <typename T>
  void number(const json& parent, const char* key, const std::string& where, T& out, bool required = false) {
    if (!parent.contains(key)) {
      if (required) problems_.push_back(where + key + ": required");
      return;
    }
    const json& v = parent.at(key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        problems_.push_back(where + key + ": expected a non-negative integer");
        return;
      }
      out = v.get<T>();
    } else {
      if (!v.is_number()) {
        problems_.push_back(where + key + ": expected a number");
        return;
      }
      out = v.get<T>();
    }
  }

  void numbers(const json& parent, const char* key, const std::string& where, std::vector<double>& out,
               bool required = false) {
    if (!parent.contains(key)) {
      if (required) problems_.push_back(where + key + ": required");
      return;
    }
    const json& v = parent.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      problems_.push_back(where + key + ": expected an array of numbers");
      return;
    }
    out = v.get<std::vector<double>>();
  }

 private:
  std::vector<std::string>& problems_;
};

ScenarioConfig from_json(const json& root, std::vector<std::string>& problems) {
  ScenarioConfig c;
  FieldReader rd(problems);
  if (!root.is_object()) {
    problems.emplace_back("top level: expected an object");
    return c;
  }
  rd.check_keys(root, "",
                {"array", "sources", "noise", "snapshots", "snr_db_list", "k_trials", "grid", "methods", "seed"});

  if (const json* array = rd.object(root, "array", "", true)) {
    rd.check_keys(*array, "array.", {"m", "spacing"});
    rd.number(*array, "m", "array.", c.sensors, true);
    rd.number(*array, "spacing", "array.", c.spacing);
  }
  if (const json* sources = rd.object(root, "sources", "", true)) {
    rd.check_keys(*sources, "sources.", {"doas_deg"});
    rd.numbers(*sources, "doas_deg", "sources.", c.doas_deg, true);
  }
  if (const json* noise = rd.object(root, "noise", "", true)) {
    rd.check_keys(*noise, "noise.", {"variances", "random"});
    const bool fixed = noise->contains("variances");
    const bool random = noise->contains("random");
    if (fixed == random) {
      problems.emplace_back("noise: give exactly one of 'variances' or 'random'");
    } else if (fixed) {
      std::vector<double> v;
      rd.numbers(*noise, "variances", "noise.", v, true);
      c.noise = std::move(v);
    } else if (const json* spec = rd.object(*noise, "random", "noise.", true)) {
      RandomNoiseSpec s;
      rd.check_keys(*spec, "noise.random.", {"max_wnpr", "realizations", "floor"});
      rd.number(*spec, "max_wnpr", "noise.random.", s.max_wnpr);
      rd.number(*spec, "realizations", "noise.random.", s.realizations);
      rd.number(*spec, "floor", "noise.random.", s.floor_variance);
      c.noise = s;
    }
  }
  rd.number(root, "snapshots", "", c.snapshots);
  rd.numbers(root, "snr_db_list", "", c.snr_db_list);
  rd.number(root, "k_trials", "", c.k_trials);
  if (const json* grid = rd.object(root, "grid", "", false)) {
    rd.check_keys(*grid, "grid.", {"min_deg", "max_deg", "step_deg"});
    rd.number(*grid, "min_deg", "grid.", c.grid.min_deg);
    rd.number(*grid, "max_deg", "grid.", c.grid.max_deg);
    rd.number(*grid, "step_deg", "grid.", c.grid.step_deg);
  }
  if (root.contains("methods")) {
    const json& m = root.at("methods");
    if (m.is_string() && m.get<std::string>() == "all") {
      c.methods = all_methods();
    } else if (m.is_array() && std::all_of(m.begin(), m.end(), [](const json& e) { return e.is_string(); })) {
      c.methods.clear();
      for (const auto& e : m) {
        try {
          c.methods.push_back(parse_method(e.get<std::string>()));
        } catch (const DomainError& err) {
          problems.push_back(std::string("methods: ") + err.what());
        }
      }
    } else {
      problems.emplace_back("methods: expected \"all\" or an array of method names");
    }
  }
  rd.number(root, "seed", "", c.seed);
  return c;
}

}  // namespace

ScenarioConfig parse_config(std::string_view json_text, std::string_view source_name) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source_name) + ": " + e.what());
  }

  std::vector<std::string> problems;
  ScenarioConfig c = from_json(root, problems);
  if (problems.empty()) {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source_name) + ": " + e.what());
    }
    return c;
  }
  std::string msg = std::string(source_name) + ": invalid scenario:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ConfigError(msg);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

std::string serialize_config(const ScenarioConfig& c) {
  json root;
  root["array"] = {{"m", c.sensors}, {"spacing", c.spacing}};
  root["sources"] = {{"doas_deg", c.doas_deg}};
  if (const auto* v = std::get_if<std::vector<double>>(&c.noise)) {
    root["noise"] = {{"variances", *v}};
  } else {
    const auto& s = std::get<RandomNoiseSpec>(c.noise);
    root["noise"] = {{"random", {{"max_wnpr", s.max_wnpr}, {"realizations", s.realizations}, {"floor", s.floor_variance}}}};
  }
  root["snapshots"] = c.snapshots;
  root["snr_db_list"] = c.snr_db_list;
  root["k_trials"] = c.k_trials;
  root["grid"] = {{"min_deg", c.grid.min_deg}, {"max_deg", c.grid.max_deg}, {"step_deg", c.grid.step_deg}};
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(method_name(m)));
  root["methods"] = methods;
  root["seed"] = c.seed;
  return root.dump(2) + "\n";
}

}  // namespace nudoa
