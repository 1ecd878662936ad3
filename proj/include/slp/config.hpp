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

#ifndef SLP_CONFIG_HPP
#define SLP_CONFIG_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "slp/errors.hpp"
#include "slp/sim_harness.hpp"

namespace slp {

/// Everything a run needs besides the output directory.
///
/// File format (INI, ';' or '#' comments):
///
///     seed = 2026
///     n_antennas = 16
///     n_users = 16
///     block_len = 50
///     qam_level = 2
///     noise_var = 1.0
///     eps_grid = 0.1, 0.05, 0.02, 0.01, 0.005
///     n_channels = 100
///     sep_trials = 200000
///     failure_budget = 0
///     schemes = zf, linear_bf, slp_heuristic, slp_block_avg, slp_block_peak
///
///     [slp_heuristic]
///     zeta = 1, 1.2
///
///     [block_solver]
///     max_iter = 0      ; 0 keeps the solver defaults
///
/// Every key is optional; omitted keys take the SimConfig defaults.
struct RunSettings {
  SimConfig sim;
  /// Degraded scheme cells tolerated before `run` exits with status 3.
  int failure_budget = 0;
};

class ConfigError : public InvalidInput {
 public:
  ConfigError(std::string field, int line, const std::string& what);
  const std::string& field() const { return field_; }
  /// 1-based, 0 when unknown.
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

RunSettings parse_config(std::string_view text);
RunSettings load_config(const std::filesystem::path& path);

/// Flat key = value rendering accepted back by parse_config.
std::string render_config(const RunSettings& s);

}  // namespace slp

#endif  // SLP_CONFIG_HPP
