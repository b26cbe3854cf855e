// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "nudoa/config.hpp"
#include "nudoa/errors.hpp"

using namespace nudoa;

namespace {

std::string config_error(std::string_view text) {
  try {
    parse_config(text, "scenario.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

constexpr const char* kMinimal = R"({
  "array": {"m": 8},
  "sources": {"doas_deg": [-3, 6]},
  "noise": {"variances": [1, 1, 1, 1, 1, 20, 30, 50]}
})";

}  // namespace

TEST(Config, MinimalExample1WithDefaults) {
  const ScenarioConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.sensors, 8u);
  EXPECT_EQ(c.spacing, 0.5);
  EXPECT_EQ(c.doas_deg, (std::vector<double>{-3, 6}));
  EXPECT_EQ(c.fixed_noise().variances(), (std::vector<double>{1, 1, 1, 1, 1, 20, 30, 50}));
  EXPECT_EQ(c.snapshots, 500u);
  EXPECT_EQ(c.k_trials, 500u);
  EXPECT_EQ(c.snr_db_list, (std::vector<double>{0, 5, 10, 15, 20}));
  EXPECT_EQ(c.grid.step_deg, 0.05);
  EXPECT_EQ(c.methods, all_methods());
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c, example1_config());
}

TEST(Config, FullRandomNoiseScenario) {
  const ScenarioConfig c = parse_config(R"({
    "array": {"m": 6, "spacing": 0.4},
    "sources": {"doas_deg": [10]},
    "noise": {"random": {"max_wnpr": 12, "realizations": 4, "floor": 0.5}},
    "snapshots": 100, "snr_db_list": [-5, 5], "k_trials": 20,
    "grid": {"min_deg": -60, "max_deg": 60, "step_deg": 0.1},
    "methods": ["phase2", "classical"], "seed": 42
  })");
  ASSERT_FALSE(c.has_fixed_noise());
  const auto& spec = std::get<RandomNoiseSpec>(c.noise);
  EXPECT_EQ(spec.max_wnpr, 12.0);
  EXPECT_EQ(spec.realizations, 4u);
  EXPECT_EQ(spec.floor_variance, 0.5);
  EXPECT_EQ(c.methods, (std::vector<Method>{Method::Phase2, Method::Classical}));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.grid.min_deg, -60.0);
}

TEST(Config, RejectsZeroVariance) {
  const std::string err = config_error(R"({"array": {"m": 2}, "sources": {"doas_deg": [0]},
                                           "noise": {"variances": [1, 0]}})");
  EXPECT_NE(err.find("noise variances must be positive"), std::string::npos) << err;
}

TEST(Config, RejectsDuplicateDoas) {
  const std::string err = config_error(R"({"array": {"m": 4}, "sources": {"doas_deg": [10, 10]},
                                           "noise": {"variances": [1, 1, 1, 1]}})");
  EXPECT_NE(err.find("DOAs must be distinct"), std::string::npos) << err;
}

TEST(Config, ReportsEveryProblem) {
  const std::string err = config_error(R"({"array": {"m": 4, "pitch": 1}, "sources": {"doas_deg": [0]},
                                           "noise": {"variances": [1, 1, 1, 1]}, "trials": 3,
                                           "methods": ["phase9"]})");
  EXPECT_NE(err.find("array.pitch: unknown key"), std::string::npos) << err;
  EXPECT_NE(err.find("trials: unknown key"), std::string::npos) << err;
  EXPECT_NE(err.find("methods:"), std::string::npos) << err;
  EXPECT_NE(err.find("scenario.json"), std::string::npos) << err;
}

TEST(Config, RequiredFields) {
  const std::string err = config_error("{}");
  EXPECT_NE(err.find("array: required"), std::string::npos) << err;
  EXPECT_NE(err.find("sources: required"), std::string::npos) << err;
  EXPECT_NE(err.find("noise: required"), std::string::npos) << err;
}

TEST(Config, TypeErrors) {
  const std::string err = config_error(R"({"array": {"m": -3}, "sources": {"doas_deg": "north"},
                                           "noise": {"variances": [1], "random": {}}})");
  EXPECT_NE(err.find("array.m: expected a non-negative integer"), std::string::npos) << err;
  EXPECT_NE(err.find("sources.doas_deg: expected an array of numbers"), std::string::npos) << err;
  EXPECT_NE(err.find("exactly one of"), std::string::npos) << err;
}

TEST(Config, ParseErrorCarriesLine) {
  const std::string err = config_error("{\n  \"array\": {\"m\": 8},\n  oops\n}");
  EXPECT_NE(err.find("scenario.json"), std::string::npos) << err;
  EXPECT_NE(err.find("line 3"), std::string::npos) << err;
}

TEST(Config, MissingFileNamesPath) {
  try {
    load_config("/nonexistent/dir/missing.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/missing.json"), std::string::npos);
  }
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / ("nudoa_cfg_" + std::to_string(::getpid()) + ".json");
  {
    std::ofstream out(path);
    out << kMinimal;
  }
  EXPECT_EQ(load_config(path), example1_config());
  std::filesystem::remove(path);
}

TEST(Config, SerializeRoundTrip) {
  for (const ScenarioConfig& c : {example1_config(), example2_config()}) {
    EXPECT_EQ(parse_config(serialize_config(c)), c);
  }
  ScenarioConfig odd = example1_config();
  odd.snr_db_list = {-7.25, 0.1, 33.0};
  odd.methods = {Method::Classical};
  odd.grid = {-45.0, 45.0, 0.01};
  odd.seed = 18446744073709551615ull;
  EXPECT_EQ(parse_config(serialize_config(odd)), odd);
}
