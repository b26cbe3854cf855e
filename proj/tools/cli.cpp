// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "nudoa/config.hpp"
#include "nudoa/errors.hpp"
#include "nudoa/harness.hpp"
#include "nudoa/snapshots.hpp"

namespace nudoa::cli {

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::string trials_out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<double> snr;
  std::string snr_list;
  std::optional<std::size_t> threads;
  std::optional<double> grid_step;
  std::string method;
  std::optional<std::size_t> realizations;
  bool timing = false;
  int verbosity = 1;
};

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--snr-list: '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError("--snr-list: empty list");
  return out;
}

ScenarioConfig resolve_config(const std::string& sub, const Options& opt) {
  ScenarioConfig config;
  if (sub == "example1" || sub == "example2") {
    if (!opt.config_path.empty()) throw ConfigError(sub + " uses a built-in scenario and takes no --config");
    if (sub == "example1") {
      config = example1_config();
    } else {
      config = example2_config();
      std::get<RandomNoiseSpec>(config.noise).realizations = 10;
      config.k_trials = 200;
    }
    config.snr_db_list = {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  } else {
    if (opt.config_path.empty()) throw ConfigError(sub + " needs --config PATH");
    config = load_config(opt.config_path);
  }

  if (opt.seed) config.seed = *opt.seed;
  if (opt.k) config.k_trials = *opt.k;
  if (!opt.snr_list.empty()) config.snr_db_list = parse_snr_list(opt.snr_list);
  if (opt.snr) config.snr_db_list = {*opt.snr};
  if (opt.grid_step) config.grid.step_deg = *opt.grid_step;
  if (!opt.method.empty() && opt.method != "all") {
    try {
      config.methods = {parse_method(opt.method)};
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--method: ") + e.what());
    }
  } else if (opt.method == "all") {
    config.methods = all_methods();
  }
  if (opt.realizations) {
    auto* spec = std::get_if<RandomNoiseSpec>(&config.noise);
    if (spec == nullptr) throw ConfigError("--realizations only applies to random noise scenarios");
    spec->realizations = *opt.realizations;
  }
  config.validate();
  return config;
}

NoiseProfile first_noise_profile(const ScenarioConfig& config) {
  if (config.has_fixed_noise()) return config.fixed_noise();
  return draw_noise_profile(std::get<RandomNoiseSpec>(config.noise), config.sensors, config.seed, 0);
}

void log_scenario(std::ostream& err, const std::string& sub, const ScenarioConfig& config, const Options& opt,
                  std::size_t threads) {
  if (opt.verbosity < 1) return;
  err << "nudoa " << sub << ": seed=" << config.seed << " M=" << config.sensors << " L=" << config.source_count()
      << " N=" << config.snapshots << " K=" << config.k_trials << " threads=" << threads << '\n';
  if (opt.verbosity > 1) err << serialize_config(config);
}

void run_spectrum(const ScenarioConfig& config, const Options& opt, std::ostream& out) {
  const Method method = opt.method.empty() || opt.method == "all" ? Method::Phase2 : config.methods.front();
  const NoiseProfile noise = first_noise_profile(config);
  const double snr = config.snr_db_list.front();
  const ArrayGeometry geometry = config.geometry();
  const SourceSet sources = SourceSet::equal_power(config.doas_deg, signal_power_for_snr(snr, noise));
  const SnapshotMatrix x =
      generate_snapshots(geometry, sources, noise, config.snapshots, RngSeed{config.seed, trial_stream(snr, 0)});
  const EstimateResult est = estimate_doa(sample_covariance(x), config.source_count(), geometry, config.grid, method);
  const Pseudospectrum s = music_pseudospectrum(est.subspace, geometry, config.grid);

  out << "theta_deg,s_value\n";
  for (std::size_t i = 0; i < s.grid_deg.size(); ++i)
    out << format_number(s.grid_deg[i]) << ',' << format_number(s.values[i]) << '\n';
}

void run_simulate(const ScenarioConfig& config, std::ostream& out) {
  const NoiseProfile noise = first_noise_profile(config);
  const double snr = config.snr_db_list.front();
  const ArrayGeometry geometry = config.geometry();
  const SourceSet sources = SourceSet::equal_power(config.doas_deg, signal_power_for_snr(snr, noise));
  const SnapshotMatrix x =
      generate_snapshots(geometry, sources, noise, config.snapshots, RngSeed{config.seed, trial_stream(snr, 0)});
  const HermitianMatrix r_hat = sample_covariance(x);

  out << "snr_db " << format_number(snr) << ", signal power " << format_number(sources.powers().front())
      << ", WNPR " << format_number(wnpr(noise)) << '\n';
  out << "true DOAs:";
  for (double d : config.doas_deg) out << ' ' << format_number(d);
  out << "\nnoise variances:";
  for (double v : noise.variances()) out << ' ' << format_number(v);
  out << '\n';

  std::vector<double> truth = config.doas_deg;
  std::sort(truth.begin(), truth.end());
  for (Method method : config.methods) {
    const EstimateResult est = estimate_doa(r_hat, config.source_count(), geometry, config.grid, method);
    out << method_name(method) << ": doas";
    for (double d : est.doa.doas_deg) out << ' ' << format_number(d);
    out << " | sq_err";
    for (std::size_t l = 0; l < truth.size(); ++l) {
      const double e = est.doa.doas_deg[l] - truth[l];
      out << ' ' << format_number(e * e);
    }
    out << " | fallback " << (est.fallback_used ? "yes" : "no") << (est.doa.padded ? " | padded" : "") << '\n';
    if (est.noise_cov) {
      out << "  sigma2 " << format_number(est.noise_cov->sigma2) << " k " << est.noise_cov->k + 1 << " c "
          << format_number(est.noise_cov->c) << "\n  q_hat";
      for (double q : est.noise_cov->q_hat.diag()) out << ' ' << format_number(q);
      out << '\n';
    }
    for (const auto& d : est.diagnostics) out << "  note: " << d << '\n';
  }
}

void run_sweep(const ScenarioConfig& config, const Options& opt, std::size_t threads, std::ostream& out,
               std::ostream& err) {
  std::vector<SweepResult> rows;
  std::vector<SweepResult> detail;
  if (config.has_fixed_noise()) {
    rows = sweep_snr(config, config.fixed_noise(), config.snr_db_list, config.k_trials, SweepOptions{threads, 0});
    detail = rows;
  } else {
    RandomQResult res = random_q_experiment(config, config.snr_db_list, config.k_trials, threads);
    if (opt.verbosity > 1) {
      for (std::size_t r = 0; r < res.profiles.size(); ++r) {
        err << "realization " << r << ": WNPR " << format_number(wnpr(res.profiles[r])) << '\n';
      }
    }
    rows = res.averaged;
    for (auto& per : res.per_realization)
      for (auto& s : per) detail.push_back(std::move(s));
  }
  write_sweep_csv(out, rows, opt.timing);

  if (!opt.trials_out_path.empty()) {
    std::ofstream trials(opt.trials_out_path);
    if (!trials) throw ConfigError("cannot write --trials-out '" + opt.trials_out_path + "'");
    write_trials_csv(trials, detail, config.source_count());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-phase subspace DOA estimation under nonuniform noise", "nudoa"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "Scenario JSON file");
  app.add_option("--out", opt.out_path, "Output file (default stdout)");
  app.add_option("--trials-out", opt.trials_out_path, "Per-trial CSV output (sweep and examples)");
  app.add_option("--seed", opt.seed, "RNG seed override");
  app.add_option("--k", opt.k, "Monte Carlo trials per SNR")->check(CLI::PositiveNumber);
  app.add_option("--snr", opt.snr, "Single SNR in dB");
  app.add_option("--snr-list", opt.snr_list, "Comma-separated SNRs in dB");
  app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--grid-step", opt.grid_step, "Pseudospectrum grid step in degrees")->check(CLI::PositiveNumber);
  app.add_option("--method", opt.method, "phase1, phase2, classical or all")
      ->check(CLI::IsMember({"phase1", "phase2", "classical", "all"}));
  app.add_option("--realizations", opt.realizations, "Noise realizations for random-noise scenarios")
      ->check(CLI::PositiveNumber);
  app.add_flag("--timing", opt.timing, "Fill the mean_trial_ms column (output is then not reproducible)");
  app.add_flag_function("-v", [&](std::int64_t n) { opt.verbosity += static_cast<int>(n); }, "More logging");
  app.add_flag_function("-q", [&](std::int64_t) { opt.verbosity = 0; }, "No logging");

  app.add_subcommand("spectrum", "Write one MUSIC pseudospectrum as theta_deg,s_value");
  app.add_subcommand("simulate", "Run one trial and print every estimate");
  app.add_subcommand("sweep", "RMSE versus SNR for a scenario file");
  app.add_subcommand("example1", "Built-in fixed nonuniform noise scenario");
  app.add_subcommand("example2", "Built-in random noise scenario (max WNPR 30)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kExitConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    const ScenarioConfig config = resolve_config(sub, opt);
    const std::size_t threads =
        opt.threads.value_or(std::max<std::size_t>(1, std::thread::hardware_concurrency()));
    log_scenario(err, sub, config, opt, threads);

    std::ofstream file;
    if (!opt.out_path.empty()) {
      file.open(opt.out_path);
      if (!file) throw ConfigError("cannot write --out '" + opt.out_path + "'");
    }
    std::ostream& sink = opt.out_path.empty() ? out : file;

    if (sub == "spectrum") {
      run_spectrum(config, opt, sink);
    } else if (sub == "simulate") {
      run_simulate(config, sink);
    } else {
      run_sweep(config, opt, threads, sink, err);
    }
    sink.flush();
    if (!sink) throw ConfigError("failed writing output");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace nudoa::cli
