// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "nudoa/array_model.hpp"
#include "nudoa/estimator.hpp"

namespace nudoa {

/// Random diagonal noise: variances i.i.d. uniform in
/// [floor_variance, floor_variance * max_wnpr], one draw per realization.
struct RandomNoiseSpec {
  double max_wnpr = 30.0;
  std::size_t realizations = 50;
  double floor_variance = 1.0;

  bool operator==(const RandomNoiseSpec&) const = default;
};

struct ScenarioConfig {
  std::size_t sensors = 8;
  double spacing = 0.5;
  std::vector<double> doas_deg;
  std::variant<std::vector<double>, RandomNoiseSpec> noise;  // fixed variances or random spec
  std::size_t snapshots = 500;
  std::vector<double> snr_db_list{0.0, 5.0, 10.0, 15.0, 20.0};
  std::size_t k_trials = 500;
  AngleGrid grid;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 1;

  ArrayGeometry geometry() const { return ArrayGeometry(sensors, spacing); }
  std::size_t source_count() const { return doas_deg.size(); }
  bool has_fixed_noise() const { return std::holds_alternative<std::vector<double>>(noise); }
  /// Throws DomainError when the noise is random.
  NoiseProfile fixed_noise() const;

  /// Collects every violated invariant; throws ConfigError listing them all.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Built-in scenario with the fixed nonuniform noise diag{1,1,1,1,1,20,30,50}.
ScenarioConfig example1_config();
/// Built-in scenario with random noise, max WNPR 30.
ScenarioConfig example2_config();

struct TrialResult {
  std::size_t trial = 0;
  Method method = Method::Phase1;
  std::vector<double> doas_hat;
  std::vector<double> sq_err;
  bool fallback = false;
  bool failed = false;
  double wall_ms = 0.0;
  std::string error;
};

struct SweepResult {
  double snr_db = 0.0;
  Method method = Method::Phase1;
  std::size_t trials_run = 0;
  double rmse_deg = 0.0;
  double fallback_rate = 0.0;
  double mean_trial_ms = 0.0;
  std::vector<TrialResult> trials;  // ordered by trial index; empty for averaged rows
};

/// Substream for one trial, keyed by (snr, trial, realization).
std::uint64_t trial_stream(double snr_db, std::size_t trial, std::size_t realization = 0);

/// One snapshot draw shared by all configured methods. Estimates are paired
/// with the true DOAs after sorting both ascending.
std::vector<TrialResult> run_trial(const ScenarioConfig& config, const NoiseProfile& noise, double snr_db,
                                   std::size_t trial, std::size_t realization = 0);

/// sqrt(sum of squared errors / (K L)).
double rmse_of(const std::vector<TrialResult>& trials);

struct SweepOptions {
  std::size_t threads = 1;
  std::size_t realization = 0;
};

/// RMSE per (SNR, method). Output order: SNR-major, methods in config order.
/// Results do not depend on the thread count.
std::vector<SweepResult> sweep_snr(const ScenarioConfig& config, const NoiseProfile& noise,
                                   const std::vector<double>& snr_list_db, std::size_t trials,
                                   const SweepOptions& options = {});

NoiseProfile draw_noise_profile(const RandomNoiseSpec& spec, std::size_t sensors, std::uint64_t seed,
                                std::size_t realization);

struct RandomQResult {
  std::vector<SweepResult> averaged;  // trials_run counts trials over all realizations
  std::vector<NoiseProfile> profiles;
  std::vector<std::vector<SweepResult>> per_realization;
};

/// Mean of the per-realization RMSEs, per (SNR, method).
RandomQResult random_q_experiment(const ScenarioConfig& config, const std::vector<double>& snr_list_db,
                                  std::size_t trials, std::size_t threads = 1);

/// snr_db,method,K,rmse_deg,fallback_rate,mean_trial_ms with 12 significant
/// digits. The timing column is left empty unless include_timing is set so
/// that seeded runs stay byte-identical.
void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& results, bool include_timing = false);

/// trial,method,theta_hat_1..L,sq_err_1..L,fallback (plus snr_db first).
void write_trials_csv(std::ostream& os, const std::vector<SweepResult>& results, std::size_t sources);

std::string format_number(double value);

}  // namespace nudoa
