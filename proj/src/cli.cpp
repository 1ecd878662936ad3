// SPDX-License-Identifier: Apache-2.0
//
// slp: symbol-level precoding simulator for multiuser MISO downlink
// Copyright (C) 2026 The slp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "slp/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "slp/sep_model.hpp"

namespace slp {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << body;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

int default_threads() {
  if (const char* env = std::getenv("SLP_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
  }
  return 1;
}

nlohmann::json config_json(const RunSettings& s) {
  const SimConfig& c = s.sim;
  nlohmann::json schemes = nlohmann::json::array();
  for (const auto& sc : c.schemes) schemes.push_back(sc.label());
  return {{"seed", c.seed},
          {"n_antennas", c.n_antennas},
          {"n_users", c.n_users},
          {"block_len", c.block_len},
          {"qam_level", c.qam_level},
          {"noise_var", c.noise_var},
          {"eps_grid", c.eps_grid},
          {"n_channels", c.n_channels},
          {"sep_trials", c.sep_trials},
          {"failure_budget", s.failure_budget},
          {"block_max_iter", c.block_max_iter},
          {"schemes", schemes}};
}

}  // namespace

std::string results_csv(const std::vector<TrialResult>& trials) {
  std::string s = "realization,eps,scheme,avg_power,peak_energy,max_emp_sep,degraded\n";
  for (const auto& t : trials) {
    for (const auto& r : t.schemes) {
      // No estimate when sep_trials = 0; write nan rather than a misleading 0.
      const std::string sep = r.sep.per_user.size() ? fmt(r.sep.max()) : std::string("nan");
      s += std::to_string(t.realization) + ',' + fmt(t.eps) + ',' + r.scheme.label() + ',' + fmt(r.avg_power) +
           ',' + fmt(r.peak_energy) + ',' + sep + ',' + (r.degraded ? "1" : "0") + '\n';
    }
  }
  return s;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string s = "scheme,eps,mean_avg_power,mean_peak_energy,max_emp_sep\n";
  for (const auto& r : rows) {
    s += r.scheme + ',' + fmt(r.eps) + ',' + fmt(r.mean_avg_power) + ',' + fmt(r.mean_peak_energy) + ',' +
         fmt(r.max_emp_sep) + '\n';
  }
  return s;
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  RunSettings settings;
  try {
    settings = load_config(opts.config);
    if (opts.seed) settings.sim.seed = *opts.seed;
  } catch (const ConfigError& e) {
    err << "config error: " << opts.config.string() << ": " << e.what() << '\n';
    return kExitConfig;
  }
  const int threads = opts.threads.value_or(default_threads());
  if (threads < 1) {
    err << "--threads must be >= 1\n";
    return kExitUsage;
  }

  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) {
    err << "cannot create " << opts.out_dir.string() << ": " << ec.message() << '\n';
    return kExitIo;
  }

  const SimConfig& cfg = settings.sim;
  out << "running " << cfg.n_channels << " realizations x " << cfg.eps_grid.size() << " eps x "
      << cfg.schemes.size() << " schemes on " << threads << " thread(s)\n"
      << std::flush;
  const auto t0 = std::chrono::steady_clock::now();
  const auto trials = run_experiment(cfg, threads);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto rows = summarize(cfg, trials);

  int degraded = 0;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& t : trials) {
    for (const auto& r : t.schemes) {
      if (r.degraded) {
        ++degraded;
        err << "degraded: realization " << t.realization << " eps " << fmt(t.eps) << ' ' << r.scheme.label() << ": "
            << r.note << '\n';
      }
      cells.push_back({{"realization", t.realization},
                       {"eps", t.eps},
                       {"scheme", r.scheme.label()},
                       {"gram_condition", t.gram_condition},
                       {"solves", r.stats.solves},
                       {"optimal", r.stats.optimal},
                       {"iterations", r.stats.iterations},
                       {"max_kkt_residual", r.stats.max_kkt_residual},
                       {"degraded", r.degraded},
                       {"note", r.note}});
    }
  }

  const auto results_path = opts.out_dir / "results.csv";
  const auto summary_path = opts.out_dir / "summary.csv";
  const auto manifest_path = opts.out_dir / "manifest.json";
  nlohmann::json manifest = {{"version", std::string("slp ") + kVersion},
                             {"config", config_json(settings)},
                             {"config_text", render_config(settings)},
                             {"artifacts",
                              {{"results", results_path.string()},
                               {"summary", summary_path.string()},
                               {"manifest", manifest_path.string()}}},
                             {"threads", threads},
                             {"wall_clock_seconds", wall},
                             {"degraded_cells", degraded},
                             {"cells", cells}};
  try {
    write_file(results_path, results_csv(trials));
    write_file(summary_path, summary_csv(rows));
    write_file(manifest_path, manifest.dump(2) + '\n');
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitIo;
  }
  out << "wrote " << results_path.string() << ", " << summary_path.string() << ", " << manifest_path.string() << " in "
      << fmt(wall) << " s\n";

  if (degraded > settings.failure_budget) {
    err << degraded << " degraded cells exceed failure_budget " << settings.failure_budget << '\n';
    return kExitFailureBudget;
  }
  return kExitOk;
}

int cmd_check(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  RunSettings settings;
  try {
    settings = load_config(config);
  } catch (const ConfigError& e) {
    err << "config error: " << config.string() << ": " << e.what() << '\n';
    return kExitConfig;
  }
  const SimConfig& cfg = settings.sim;
  const QamSpec spec(cfg.qam_level);
  out << "N=" << cfg.n_antennas << " K=" << cfg.n_users << " T=" << cfg.block_len << " L=" << cfg.qam_level
      << " noise_var=" << fmt(cfg.noise_var) << " seed=" << cfg.seed << '\n';
  char line[160];
  for (double eps : cfg.eps_grid) {
    const GainConstants g = gain_constants(cfg.noise_std(), eps);
    std::snprintf(line, sizeof line, "eps=%-8g alpha=%.6f beta=%.6f gamma=%.6f\n", eps, g.alpha, g.beta,
                  sinr_target_from_sep(spec.avg_energy(), eps));
    out << line;
  }

  SimConfig smoke = cfg;
  smoke.n_users = 2;
  smoke.n_antennas = 2;
  smoke.block_len = 2;
  smoke.n_channels = 1;
  smoke.eps_grid = {cfg.eps_grid.front()};
  smoke.sep_trials = 2000;
  bool ok = true;
  try {
    for (const auto& r : run_cell(smoke, 0, 0).schemes) {
      const bool good = !r.degraded && std::isfinite(r.avg_power) && r.peak_energy >= r.avg_power * (1 - 1e-12);
      out << "smoke " << r.scheme.label() << ": " << (good ? "ok" : "FAILED") << '\n';
      if (!good) {
        err << "smoke trial failed for " << r.scheme.label() << (r.note.empty() ? "" : ": " + r.note) << '\n';
        ok = false;
      }
    }
  } catch (const std::exception& e) {
    err << "smoke trial failed: " << e.what() << '\n';
    ok = false;
  }
  return ok ? kExitOk : kExitConfig;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Symbol-level precoding simulator"};
  app.set_version_flag("--version", std::string("slp ") + kVersion);
  app.require_subcommand(1);

  RunOptions run;
  int threads = 0;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the Monte Carlo experiment and write CSV artifacts");
  run_cmd->add_option("--config", run.config, "INI config file")->required();
  run_cmd->add_option("--out", run.out_dir, "Output directory")->required();
  auto* threads_opt = run_cmd->add_option("--threads", threads, "Worker threads (default $SLP_THREADS or 1)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the config seed");

  std::filesystem::path check_config;
  auto* check_cmd = app.add_subcommand("check", "Validate a config and run a smoke trial");
  check_cmd->add_option("--config", check_config, "INI config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (*run_cmd) {
    if (*threads_opt) run.threads = threads;
    if (*seed_opt) run.seed = seed;
    return cmd_run(run, std::cout, std::cerr);
  }
  return cmd_check(check_config, std::cout, std::cerr);
}

}  // namespace slp
