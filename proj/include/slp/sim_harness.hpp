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

#ifndef SLP_SIM_HARNESS_HPP
#define SLP_SIM_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "slp/precoders.hpp"

namespace slp {

enum class SchemeKind { ZF, LinearBF, SlpHeuristic, SlpBlockAvg, SlpBlockPeak };

struct Scheme {
  SchemeKind kind = SchemeKind::ZF;
  /// Gain scale, SlpHeuristic only.
  double zeta = 1.0;

  /// "ZF", "LinearBF", "SlpHeuristic(1.2)", "SlpBlockAvg", "SlpBlockPeak".
  std::string label() const;
  friend bool operator==(const Scheme&, const Scheme&) = default;
};

struct SimConfig {
  int n_antennas = 16;
  int n_users = 16;
  int block_len = 50;
  int qam_level = 2;
  double noise_var = 1.0;
  std::vector<double> eps_grid{0.10, 0.05, 0.02, 0.01, 0.005};
  int n_channels = 100;
  std::vector<Scheme> schemes{{SchemeKind::ZF, 1.0},
                              {SchemeKind::LinearBF, 1.0},
                              {SchemeKind::SlpHeuristic, 1.0},
                              {SchemeKind::SlpBlockAvg, 1.0},
                              {SchemeKind::SlpBlockPeak, 1.0}};
  std::uint64_t seed = 1;
  /// Noise trials per user per cell for the SEP estimate; 0 skips it.
  std::size_t sep_trials = 200000;
  /// Iteration cap for the block solvers; 0 keeps their defaults.
  int block_max_iter = 0;

  double noise_std() const;
  /// Throws InvalidInput / DomainError naming the offending field.
  void validate() const;
};

struct SepEstimate {
  Eigen::VectorXd per_user;
  Eigen::VectorXd std_err;
  std::size_t trials = 0;

  double max() const { return per_user.size() ? per_user.maxCoeff() : 0.0; }
};

struct SolverStats {
  int solves = 0;
  int optimal = 0;
  long iterations = 0;
  double max_kkt_residual = 0.0;

  void add(const SolveReport& r);
};

struct SchemeResult {
  Scheme scheme;
  double avg_power = 0.0;
  double peak_energy = 0.0;
  SepEstimate sep;
  SolverStats stats;
  /// Set when a solve failed or did not reach Optimal; metrics are then
  /// excluded from the summary means.
  bool degraded = false;
  std::string note;
  Eigen::VectorXd gains;
};

/// One (channel realization, eps) cell.
struct TrialResult {
  int realization = 0;
  int eps_index = 0;
  double eps = 0.0;
  double gram_condition = 1.0;
  std::vector<SchemeResult> schemes;
};

/// i.i.d. CN(0, 1) entries. A numerically rank-deficient draw is replaced
/// by a redraw from the next sub-seed, with a log line.
ChannelState gen_channel(std::uint64_t seed, int users, int antennas);

/// y = H x + v for each column of x_block, v ~ CN(0, noise_std^2 I).
Eigen::MatrixXcd transmit_receive(const ChannelState& ch, const Eigen::MatrixXcd& x_block, double noise_std,
                                  std::uint64_t seed);

/// Empirical per-user SEP of detecting dec(y / d_i) against the block's
/// symbols. Each slot is reused for ceil(trials / T) noise draws.
SepEstimate estimate_sep(const ChannelState& ch, const Eigen::MatrixXcd& x_block, const Eigen::VectorXd& gains,
                         std::span<const QamSpec> specs, const SymbolBlock& block, double noise_std,
                         std::size_t trials, std::uint64_t seed);

/// Channel and symbol block of one realization; every eps cell of that
/// realization uses these.
ChannelState realization_channel(const SimConfig& cfg, int realization);
SymbolBlock realization_symbols(const SimConfig& cfg, int realization);

/// Runs every configured scheme on one (realization, eps) cell.
TrialResult run_cell(const SimConfig& cfg, int realization, int eps_index);

/// All cells, ordered by realization then eps index. Cells are spread over
/// `threads` workers; the output does not depend on the thread count.
std::vector<TrialResult> run_experiment(const SimConfig& cfg, int threads = 1);

struct SummaryRow {
  std::string scheme;
  double eps = 0.0;
  double mean_avg_power = 0.0;
  double mean_peak_energy = 0.0;
  double max_emp_sep = 0.0;
  int realizations = 0;
  int degraded = 0;
};

/// Means over non-degraded realizations, one row per scheme and eps.
std::vector<SummaryRow> summarize(const SimConfig& cfg, const std::vector<TrialResult>& trials);

}  // namespace slp

#endif  // SLP_SIM_HARNESS_HPP
