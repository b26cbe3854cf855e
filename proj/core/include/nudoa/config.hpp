// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nudoa/harness.hpp"

namespace nudoa {

// Scenario files are JSON:
//
//   {
//     "array":    {"m": 8, "spacing": 0.5},
//     "sources":  {"doas_deg": [-3, 6]},
//     "noise":    {"variances": [1, 1, 1, 1, 1, 20, 30, 50]}
//              or {"random": {"max_wnpr": 30, "realizations": 50, "floor": 1}},
//     "snapshots": 500,
//     "snr_db_list": [0, 5, 10, 15, 20],
//     "k_trials": 500,
//     "grid": {"min_deg": -90, "max_deg": 90, "step_deg": 0.05},
//     "methods": ["phase1", "phase2", "classical"]   (or "all"),
//     "seed": 1
//   }
//
// array.m, sources.doas_deg and noise are required; everything else has the
// defaults shown. Unknown keys are rejected.

/// Parses and validates; throws ConfigError carrying every problem found.
ScenarioConfig parse_config(std::string_view json_text, std::string_view source_name = "<config>");

/// Throws ConfigError naming the path if it cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical JSON text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

}  // namespace nudoa
