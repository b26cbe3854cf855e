// SPDX-License-Identifier: Apache-2.0
#include "nudoa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "nudoa/errors.hpp"
#include "nudoa/snapshots.hpp"

namespace nudoa {

NoiseProfile ScenarioConfig::fixed_noise() const {
  if (!has_fixed_noise()) throw DomainError("scenario uses random noise; draw a profile first");
  return NoiseProfile(std::get<std::vector<double>>(noise));
}

void ScenarioConfig::validate() const {
  std::vector<std::string> problems;
  if (sensors < 2) problems.emplace_back("array.m: need at least 2 sensors");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) problems.emplace_back("array.spacing: must be positive");
  if (doas_deg.empty()) problems.emplace_back("sources.doas_deg: at least one source is required");
  if (doas_deg.size() >= sensors) problems.emplace_back("sources.doas_deg: need fewer sources than sensors");
  for (double d : doas_deg)
    if (!(d > -90.0 && d < 90.0)) problems.emplace_back("sources.doas_deg: " + format_number(d) + " outside (-90, 90)");
  for (std::size_t i = 0; i < doas_deg.size(); ++i)
    for (std::size_t j = i + 1; j < doas_deg.size(); ++j)
      if (doas_deg[i] == doas_deg[j]) problems.emplace_back("sources.doas_deg: DOAs must be distinct");

  if (const auto* v = std::get_if<std::vector<double>>(&noise)) {
    if (v->size() != sensors) {
      problems.emplace_back("noise.variances: expected " + std::to_string(sensors) + " entries, got " +
                            std::to_string(v->size()));
    }
    if (std::any_of(v->begin(), v->end(), [](double x) { return !(x > 0.0) || !std::isfinite(x); }))
      problems.emplace_back("noise.variances: noise variances must be positive");
  } else {
    const auto& spec = std::get<RandomNoiseSpec>(noise);
    if (!(spec.max_wnpr >= 1.0)) problems.emplace_back("noise.random.max_wnpr: must be >= 1");
    if (spec.realizations < 1) problems.emplace_back("noise.random.realizations: must be >= 1");
    if (!(spec.floor_variance > 0.0)) problems.emplace_back("noise.random.floor: must be positive");
  }

  if (snapshots < 1) problems.emplace_back("snapshots: must be >= 1");
  if (snr_db_list.empty()) problems.emplace_back("snr_db_list: must not be empty");
  if (k_trials < 1) problems.emplace_back("k_trials: must be >= 1");
  if (!(grid.step_deg > 0.0)) problems.emplace_back("grid.step_deg: must be positive");
  if (!(grid.min_deg >= -90.0 && grid.max_deg <= 90.0 && grid.min_deg < grid.max_deg))
    problems.emplace_back("grid: need -90 <= min_deg < max_deg <= 90");
  else if (grid.step_deg > 0.0 && (grid.max_deg - grid.min_deg) / grid.step_deg < 4.0)
    problems.emplace_back("grid: needs at least 3 interior points");
  if (methods.empty()) problems.emplace_back("methods: must not be empty");

  if (!problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
}

ScenarioConfig example1_config() {
  ScenarioConfig c;
  c.sensors = 8;
  c.spacing = 0.5;
  c.doas_deg = {-3.0, 6.0};
  c.noise = std::vector<double>{1, 1, 1, 1, 1, 20, 30, 50};
  c.snapshots = 500;
  c.k_trials = 500;
  return c;
}

ScenarioConfig example2_config() {
  ScenarioConfig c = example1_config();
  c.noise = RandomNoiseSpec{30.0, 50, 1.0};
  return c;
}

std::uint64_t trial_stream(double snr_db, std::size_t trial, std::size_t realization) {
  std::uint64_t h = mix64(std::bit_cast<std::uint64_t>(snr_db));
  h = mix64(h ^ static_cast<std::uint64_t>(realization));
  return mix64(h ^ (static_cast<std::uint64_t>(trial) * 0xd1b54a32d192ed03ULL));
}

std::vector<TrialResult> run_trial(const ScenarioConfig& config, const NoiseProfile& noise, double snr_db,
                                   std::size_t trial, std::size_t realization) {
  const ArrayGeometry geometry = config.geometry();
  const SourceSet sources = SourceSet::equal_power(config.doas_deg, signal_power_for_snr(snr_db, noise));
  const SnapshotMatrix x = generate_snapshots(geometry, sources, noise, config.snapshots,
                                              RngSeed{config.seed, trial_stream(snr_db, trial, realization)});
  const HermitianMatrix r_hat = sample_covariance(x);
  const std::vector<double> grid = config.grid.points();

  std::vector<double> truth = config.doas_deg;
  std::sort(truth.begin(), truth.end());

  std::vector<TrialResult> out;
  out.reserve(config.methods.size());
  for (Method method : config.methods) {
    TrialResult tr;
    tr.trial = trial;
    tr.method = method;
    const auto start = std::chrono::steady_clock::now();
    try {
      const EstimateResult est = estimate_doa(r_hat, truth.size(), geometry, grid, method);
      tr.doas_hat = est.doa.doas_deg;
      tr.fallback = est.fallback_used;
    } catch (const std::exception& e) {
      // Counted against the method with a broadside guess rather than dropped.
      tr.failed = true;
      tr.error = e.what();
      tr.doas_hat.assign(truth.size(), 0.0);
    }
    tr.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    tr.sq_err.resize(truth.size());
    for (std::size_t l = 0; l < truth.size(); ++l) {
      const double d = tr.doas_hat[l] - truth[l];
      tr.sq_err[l] = d * d;
    }
    out.push_back(std::move(tr));
  }
  return out;
}

double rmse_of(const std::vector<TrialResult>& trials) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& t : trials) {
    for (double e : t.sq_err) sum += e;
    count += t.sq_err.size();
  }
  return count == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(count));
}

namespace {

SweepResult summarize(double snr_db, Method method, std::vector<TrialResult> trials) {
  SweepResult r;
  r.snr_db = snr_db;
  r.method = method;
  r.trials_run = trials.size();
  r.rmse_deg = rmse_of(trials);
  double fallbacks = 0.0;
  double ms = 0.0;
  for (const auto& t : trials) {
    fallbacks += (t.fallback || t.failed) ? 1.0 : 0.0;
    ms += t.wall_ms;
  }
  const double k = static_cast<double>(std::max<std::size_t>(trials.size(), 1));
  r.fallback_rate = fallbacks / k;
  r.mean_trial_ms = ms / k;
  r.trials = std::move(trials);
  return r;
}

// Runs body(i) for i in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            body(i);
          } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<SweepResult> sweep_snr(const ScenarioConfig& config, const NoiseProfile& noise,
                                   const std::vector<double>& snr_list_db, std::size_t trials,
                                   const SweepOptions& options) {
  if (trials < 1) throw DomainError("sweep needs K >= 1");
  if (noise.size() != config.sensors) throw DomainError("noise profile length differs from sensor count");

  std::vector<SweepResult> results;
  for (double snr : snr_list_db) {
    std::vector<std::vector<TrialResult>> per_trial(trials);
    parallel_for(trials, options.threads,
                 [&](std::size_t i) { per_trial[i] = run_trial(config, noise, snr, i, options.realization); });

    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      std::vector<TrialResult> column;
      column.reserve(trials);
      for (auto& t : per_trial) column.push_back(std::move(t[m]));
      results.push_back(summarize(snr, config.methods[m], std::move(column)));
    }
  }
  return results;
}

NoiseProfile draw_noise_profile(const RandomNoiseSpec& spec, std::size_t sensors, std::uint64_t seed,
                                std::size_t realization) {
  auto engine = make_engine(RngSeed{seed, mix64(0x51a7c0feULL ^ mix64(realization))});
  std::uniform_real_distribution<double> dist(spec.floor_variance, spec.floor_variance * spec.max_wnpr);
  std::vector<double> v(sensors);
  for (double& x : v) x = dist(engine);

  // The draw range already caps the ratio; compress toward the minimum if
  // rounding ever pushes it over.
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double lo_v = *lo;
  const double ratio = *hi / lo_v;
  if (ratio > spec.max_wnpr) {
    const double scale = (spec.max_wnpr - 1.0) / (ratio - 1.0);
    for (double& x : v) x = lo_v + (x - lo_v) * scale;
  }
  return NoiseProfile(std::move(v));
}

RandomQResult random_q_experiment(const ScenarioConfig& config, const std::vector<double>& snr_list_db,
                                  std::size_t trials, std::size_t threads) {
  const auto* spec = std::get_if<RandomNoiseSpec>(&config.noise);
  if (spec == nullptr) throw DomainError("random_q_experiment needs a random noise specification");

  RandomQResult out;
  for (std::size_t r = 0; r < spec->realizations; ++r) {
    out.profiles.push_back(draw_noise_profile(*spec, config.sensors, config.seed, r));
    out.per_realization.push_back(
        sweep_snr(config, out.profiles.back(), snr_list_db, trials, SweepOptions{threads, r}));
  }

  const std::size_t rows = out.per_realization.front().size();
  const double count = static_cast<double>(spec->realizations);
  for (std::size_t i = 0; i < rows; ++i) {
    SweepResult avg;
    avg.snr_db = out.per_realization.front()[i].snr_db;
    avg.method = out.per_realization.front()[i].method;
    for (const auto& realization : out.per_realization) {
      const SweepResult& s = realization[i];
      avg.trials_run += s.trials_run;
      avg.rmse_deg += s.rmse_deg / count;
      avg.fallback_rate += s.fallback_rate / count;
      avg.mean_trial_ms += s.mean_trial_ms / count;
    }
    out.averaged.push_back(std::move(avg));
  }
  return out;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& results, bool include_timing) {
  os << "snr_db,method,K,rmse_deg,fallback_rate,mean_trial_ms\n";
  for (const auto& r : results) {
    os << format_number(r.snr_db) << ',' << method_name(r.method) << ',' << r.trials_run << ','
       << format_number(r.rmse_deg) << ',' << format_number(r.fallback_rate) << ',';
    if (include_timing) os << format_number(r.mean_trial_ms);
    os << '\n';
  }
}

void write_trials_csv(std::ostream& os, const std::vector<SweepResult>& results, std::size_t sources) {
  os << "snr_db,trial,method";
  for (std::size_t l = 1; l <= sources; ++l) os << ",theta_hat_" << l;
  for (std::size_t l = 1; l <= sources; ++l) os << ",sq_err_" << l;
  os << ",fallback\n";
  for (const auto& r : results) {
    for (const auto& t : r.trials) {
      os << format_number(r.snr_db) << ',' << t.trial << ',' << method_name(t.method);
      for (double d : t.doas_hat) os << ',' << format_number(d);
      for (double e : t.sq_err) os << ',' << format_number(e);
      os << ',' << ((t.fallback || t.failed) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace nudoa
