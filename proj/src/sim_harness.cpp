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

#include "slp/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <random>
#include <thread>

#include "slp/errors.hpp"
#include "slp/random.hpp"

namespace slp {

namespace {

enum SeedTag : std::uint64_t { kChannelTag = 1, kSymbolTag = 2, kNoiseTag = 3 };

std::string format_zeta(double z) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", z);
  return buf;
}

}  // namespace

std::string Scheme::label() const {
  switch (kind) {
    case SchemeKind::ZF:
      return "ZF";
    case SchemeKind::LinearBF:
      return "LinearBF";
    case SchemeKind::SlpHeuristic:
      return "SlpHeuristic(" + format_zeta(zeta) + ")";
    case SchemeKind::SlpBlockAvg:
      return "SlpBlockAvg";
    case SchemeKind::SlpBlockPeak:
      return "SlpBlockPeak";
  }
  return "?";
}

double SimConfig::noise_std() const { return std::sqrt(noise_var); }

void SimConfig::validate() const {
  if (n_users < 1) throw InvalidInput("n_users: must be >= 1");
  if (n_antennas < n_users) throw InvalidInput("n_users: K > N is not supported (need n_users <= n_antennas)");
  if (block_len < 1) throw InvalidInput("block_len: must be >= 1");
  if (qam_level < 1) throw InvalidInput("qam_level: must be >= 1");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw InvalidInput("noise_var: must be positive");
  if (n_channels < 1) throw InvalidInput("n_channels: must be >= 1");
  if (eps_grid.empty()) throw InvalidInput("eps_grid: at least one value is required");
  for (double e : eps_grid) {
    if (!(e > 0.0 && e < 1.0)) {
      throw DomainError("eps_grid: " + std::to_string(e) + " is outside (0, 1): unattainable SEP requirement");
    }
  }
  if (block_max_iter < 0) throw InvalidInput("block_solver.max_iter: must be >= 0");
  if (schemes.empty()) throw InvalidInput("schemes: at least one scheme must be enabled");
  for (const auto& s : schemes) {
    if (s.kind == SchemeKind::SlpHeuristic && !(s.zeta >= 1.0)) {
      throw InvalidInput("slp_heuristic.zeta: must be >= 1");
    }
  }
}

void SolverStats::add(const SolveReport& r) {
  ++solves;
  if (r.optimal()) ++optimal;
  iterations += r.iterations;
  if (std::isfinite(r.kkt_residual)) max_kkt_residual = std::max(max_kkt_residual, r.kkt_residual);
}

ChannelState gen_channel(std::uint64_t seed, int users, int antennas) {
  if (users > antennas) throw ChannelError("gen_channel: K > N");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(attempt == 0 ? seed : derive_seed({seed, attempt}));
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd h(users, antennas);
    for (Eigen::Index i = 0; i < users; ++i) {
      for (Eigen::Index j = 0; j < antennas; ++j) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        h(i, j) = cdouble(re, im);
      }
    }
    try {
      return ChannelState(std::move(h));
    } catch (const ChannelError& e) {
      std::clog << "gen_channel: redrawing channel (seed " << seed << ", attempt " << attempt << "): " << e.what()
                << '\n';
      if (attempt >= 100) throw;
    }
  }
}

Eigen::MatrixXcd transmit_receive(const ChannelState& ch, const Eigen::MatrixXcd& x_block, double noise_std,
                                  std::uint64_t seed) {
  if (x_block.rows() != ch.antennas()) throw InvalidInput("transmit_receive: x must have N rows");
  Eigen::MatrixXcd y = ch.h_matrix() * x_block;
  if (noise_std == 0.0) return y;
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, noise_std / std::sqrt(2.0));
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      y(i, t) += cdouble(re, im);
    }
  }
  return y;
}

SepEstimate estimate_sep(const ChannelState& ch, const Eigen::MatrixXcd& x_block, const Eigen::VectorXd& gains,
                         std::span<const QamSpec> specs, const SymbolBlock& block, double noise_std,
                         std::size_t trials, std::uint64_t seed) {
  const Eigen::Index k = ch.users();
  const Eigen::Index slots = block.slots();
  if (trials < 1) throw InvalidInput("estimate_sep: need at least one trial");
  if (x_block.cols() != slots || gains.size() != k || static_cast<Eigen::Index>(specs.size()) != k) {
    throw InvalidInput("estimate_sep: dimension mismatch");
  }
  const auto per_slot = static_cast<std::size_t>((trials + static_cast<std::size_t>(slots) - 1) /
                                                 static_cast<std::size_t>(slots));
  const Eigen::MatrixXcd clean = ch.h_matrix() * x_block;

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, noise_std / std::sqrt(2.0));
  std::vector<std::size_t> errors(static_cast<std::size_t>(k), 0);
  for (Eigen::Index t = 0; t < slots; ++t) {
    for (std::size_t draw = 0; draw < per_slot; ++draw) {
      for (Eigen::Index i = 0; i < k; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        const cdouble y = clean(i, t) + cdouble(re, im);
        if (decide(specs[static_cast<std::size_t>(i)], y / gains[i]) != block.at(i, t)) {
          ++errors[static_cast<std::size_t>(i)];
        }
      }
    }
  }
  SepEstimate est;
  est.trials = per_slot * static_cast<std::size_t>(slots);
  est.per_user.resize(k);
  est.std_err.resize(k);
  const double m = static_cast<double>(est.trials);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double p = static_cast<double>(errors[static_cast<std::size_t>(i)]) / m;
    est.per_user[i] = p;
    est.std_err[i] = std::sqrt(p * (1.0 - p) / m);
  }
  return est;
}

namespace {

void run_scheme(const SimConfig& cfg, const ChannelState& ch, std::span<const QamSpec> specs,
                const SymbolBlock& block, std::span<const GainConstants> constants, double eps,
                std::uint64_t noise_seed, SchemeResult& res) {
  const Eigen::Index k = ch.users();
  const Eigen::Index slots = block.slots();
  Eigen::MatrixXcd x(ch.antennas(), slots);
  Eigen::VectorXd alpha(k);
  for (Eigen::Index i = 0; i < k; ++i) alpha[i] = constants[static_cast<std::size_t>(i)].alpha;

  switch (res.scheme.kind) {
    case SchemeKind::ZF: {
      const GainVector d(alpha);
      for (Eigen::Index t = 0; t < slots; ++t) x.col(t) = zf_precode(ch, d, block.slot(t)).x;
      res.gains = d.values();
      break;
    }
    case SchemeKind::LinearBF: {
      Eigen::VectorXd rho(k);
      Eigen::VectorXd gamma(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        rho[i] = specs[static_cast<std::size_t>(i)].avg_energy();
        gamma[i] = sinr_target_from_sep(rho[i], eps);
      }
      const BeamformerMatrix w = sinr_beamforming(ch, gamma, rho, cfg.noise_var);
      for (Eigen::Index t = 0; t < slots; ++t) x.col(t) = w.w * symbol_vector(block.slot(t));
      res.gains = w.effective_gains(ch);
      res.stats.iterations += w.iterations;
      break;
    }
    case SchemeKind::SlpHeuristic: {
      const GainVector d = heuristic_gains(constants, res.scheme.zeta);
      for (Eigen::Index t = 0; t < slots; ++t) {
        const SepBounds sb = build_bounds(specs, block.slot(t), constants);
        const PrecodeOutput out = slp_per_symbol(ch, sb, d, block.slot(t));
        x.col(t) = out.x;
        res.stats.add(*out.report);
      }
      res.gains = d.values();
      break;
    }
    case SchemeKind::SlpBlockAvg:
    case SchemeKind::SlpBlockPeak: {
      IneqQpOptions avg_opts;
      MinMaxOptions peak_opts;
      if (cfg.block_max_iter > 0) {
        avg_opts.max_iter = cfg.block_max_iter;
        peak_opts.max_iter = cfg.block_max_iter;
      }
      const BlockDesign bd = res.scheme.kind == SchemeKind::SlpBlockAvg
                                 ? block_average_design(ch, specs, block, constants, avg_opts)
                                 : block_peak_design(ch, specs, block, constants, peak_opts);
      x = bd.signals;
      res.gains = bd.gains;
      res.stats.add(bd.report);
      break;
    }
  }
  if (res.stats.optimal < res.stats.solves) {
    res.degraded = true;
    res.note = std::to_string(res.stats.solves - res.stats.optimal) + " solve(s) not optimal";
  }

  res.avg_power = 0.0;
  res.peak_energy = 0.0;
  for (Eigen::Index t = 0; t < slots; ++t) {
    const double e = x.col(t).squaredNorm();
    res.avg_power += e;
    res.peak_energy = std::max(res.peak_energy, e);
  }
  res.avg_power /= static_cast<double>(slots);

  if (cfg.sep_trials == 0) return;
  if (res.gains.minCoeff() <= 0.0) {
    res.degraded = true;
    res.note = "non-positive receive gain";
    return;
  }
  res.sep = estimate_sep(ch, x, res.gains, specs, block, cfg.noise_std(), cfg.sep_trials, noise_seed);
}

}  // namespace

ChannelState realization_channel(const SimConfig& cfg, int realization) {
  return gen_channel(derive_seed({cfg.seed, static_cast<std::uint64_t>(realization), kChannelTag}), cfg.n_users,
                     cfg.n_antennas);
}

SymbolBlock realization_symbols(const SimConfig& cfg, int realization) {
  const std::vector<QamSpec> specs(static_cast<std::size_t>(cfg.n_users), QamSpec(cfg.qam_level));
  return SymbolBlock::draw(specs, derive_seed({cfg.seed, static_cast<std::uint64_t>(realization), kSymbolTag}),
                           cfg.block_len);
}

TrialResult run_cell(const SimConfig& cfg, int realization, int eps_index) {
  const auto r = static_cast<std::uint64_t>(realization);
  const double eps = cfg.eps_grid.at(static_cast<std::size_t>(eps_index));
  const std::vector<QamSpec> specs(static_cast<std::size_t>(cfg.n_users), QamSpec(cfg.qam_level));
  const ChannelState ch = realization_channel(cfg, realization);
  // One symbol block per realization, shared by every eps of the grid.
  const SymbolBlock block = realization_symbols(cfg, realization);
  const std::vector<GainConstants> constants(static_cast<std::size_t>(cfg.n_users),
                                             gain_constants(cfg.noise_std(), eps));

  TrialResult out;
  out.realization = realization;
  out.eps_index = eps_index;
  out.eps = eps;
  out.gram_condition = ch.gram_condition();
  out.schemes.reserve(cfg.schemes.size());
  for (std::size_t j = 0; j < cfg.schemes.size(); ++j) {
    SchemeResult res;
    res.scheme = cfg.schemes[j];
    const std::uint64_t noise_seed =
        derive_seed({cfg.seed, r, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(eps_index), kNoiseTag});
    try {
      run_scheme(cfg, ch, specs, block, constants, eps, noise_seed, res);
    } catch (const std::exception& e) {
      res.degraded = true;
      res.note = e.what();
      res.avg_power = std::numeric_limits<double>::quiet_NaN();
      res.peak_energy = std::numeric_limits<double>::quiet_NaN();
    }
    out.schemes.push_back(std::move(res));
  }
  return out;
}

std::vector<TrialResult> run_experiment(const SimConfig& cfg, int threads) {
  cfg.validate();
  const int n_eps = static_cast<int>(cfg.eps_grid.size());
  const int n_cells = cfg.n_channels * n_eps;
  std::vector<TrialResult> results(static_cast<std::size_t>(n_cells));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c = next.fetch_add(1); c < n_cells; c = next.fetch_add(1)) {
      results[static_cast<std::size_t>(c)] = run_cell(cfg, c / n_eps, c % n_eps);
    }
  };
  const int n_workers = std::clamp(threads, 1, std::max(1, n_cells));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  return results;
}

std::vector<SummaryRow> summarize(const SimConfig& cfg, const std::vector<TrialResult>& trials) {
  std::vector<SummaryRow> rows;
  for (std::size_t j = 0; j < cfg.schemes.size(); ++j) {
    for (std::size_t e = 0; e < cfg.eps_grid.size(); ++e) {
      SummaryRow row;
      row.scheme = cfg.schemes[j].label();
      row.eps = cfg.eps_grid[e];
      double sum_avg = 0.0;
      double sum_peak = 0.0;
      double max_sep = cfg.sep_trials > 0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
      for (const auto& tr : trials) {
        if (tr.eps_index != static_cast<int>(e)) continue;
        const SchemeResult& sr = tr.schemes.at(j);
        if (sr.degraded) {
          ++row.degraded;
          continue;
        }
        ++row.realizations;
        sum_avg += sr.avg_power;
        sum_peak += sr.peak_energy;
        if (cfg.sep_trials > 0 && sr.sep.per_user.size() > 0) max_sep = std::max(max_sep, sr.sep.max());
      }
      const double n = static_cast<double>(row.realizations);
      row.mean_avg_power = row.realizations ? sum_avg / n : std::numeric_limits<double>::quiet_NaN();
      row.mean_peak_energy = row.realizations ? sum_peak / n : std::numeric_limits<double>::quiet_NaN();
      row.max_emp_sep = max_sep;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace slp
