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

#ifndef SLP_CLI_HPP
#define SLP_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slp/config.hpp"
#include "slp/sim_harness.hpp"

namespace slp {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitFailureBudget = 3, kExitIo = 4 };

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

/// Column order: realization,eps,scheme,avg_power,peak_energy,max_emp_sep,degraded
std::string results_csv(const std::vector<TrialResult>& trials);
/// Column order: scheme,eps,mean_avg_power,mean_peak_energy,max_emp_sep
std::string summary_csv(const std::vector<SummaryRow>& rows);

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Entry point behind the `slp` executable.
int run_cli(int argc, char** argv);

}  // namespace slp

#endif  // SLP_CLI_HPP
