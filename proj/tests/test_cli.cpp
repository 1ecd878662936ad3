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


#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "slp/cli.hpp"
#include "slp/sep_model.hpp"

using namespace slp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("slp_cli_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kBase =
    "seed = 3\nn_antennas = 2\nn_users = 2\nblock_len = 4\nn_channels = 2\nsep_trials = 500\n"
    "eps_grid = 0.1, 0.05\n";

const std::string kSmall = kBase + "schemes = zf\n";

// Runs the installed binary and returns its exit status, or -1 when unavailable.
int spawn(const std::string& args) {
  const char* bin = std::getenv("SLP_CLI");
  if (bin == nullptr) return -1;
  const int status = std::system(("\"" + std::string(bin) + "\" " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run writes results, summary and manifest") {
  TempDir dir("run");
  write(dir.path / "a.ini", kSmall);
  RunOptions opts{dir.path / "a.ini", dir.path / "out", 1, std::nullopt};
  std::ostringstream out, err;
  REQUIRE(cmd_run(opts, out, err) == kExitOk);
  CHECK(err.str().empty());

  const std::string results = slurp(dir.path / "out" / "results.csv");
  std::istringstream lines(results);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "realization,eps,scheme,avg_power,peak_energy,max_emp_sep,degraded");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  CHECK(rows == 4);

  const std::string summary = slurp(dir.path / "out" / "summary.csv");
  CHECK(summary.rfind("scheme,eps,mean_avg_power,mean_peak_energy,max_emp_sep\n", 0) == 0);

  const auto manifest = nlohmann::json::parse(slurp(dir.path / "out" / "manifest.json"));
  CHECK(manifest["version"] == std::string("slp ") + kVersion);
  CHECK(manifest["threads"] == 1);
  CHECK(manifest["degraded_cells"] == 0);
  CHECK(manifest["cells"].size() == 4);
  CHECK(manifest["config"]["n_users"] == 2);
  CHECK(manifest["wall_clock_seconds"].get<double>() >= 0.0);
  CHECK(manifest.contains("config_text"));
}

TEST_CASE("repeated runs and thread counts give identical results") {
  TempDir dir("repeat");
  write(dir.path / "a.ini", kBase + "schemes = zf, slp_heuristic, slp_block_avg\n");
  std::ostringstream out, err;
  REQUIRE(cmd_run({dir.path / "a.ini", dir.path / "o1", 1, std::nullopt}, out, err) == kExitOk);
  REQUIRE(cmd_run({dir.path / "a.ini", dir.path / "o2", 1, std::nullopt}, out, err) == kExitOk);
  REQUIRE(cmd_run({dir.path / "a.ini", dir.path / "o3", 3, std::nullopt}, out, err) == kExitOk);
  const std::string r1 = slurp(dir.path / "o1" / "results.csv");
  CHECK(r1 == slurp(dir.path / "o2" / "results.csv"));
  CHECK(r1 == slurp(dir.path / "o3" / "results.csv"));

  REQUIRE(cmd_run({dir.path / "a.ini", dir.path / "o4", 1, std::uint64_t{4}}, out, err) == kExitOk);
  CHECK(r1 != slurp(dir.path / "o4" / "results.csv"));
}

TEST_CASE("config problems exit with code 2") {
  TempDir dir("bad");
  write(dir.path / "eps.ini", "eps_grid = 0\n");
  write(dir.path / "users.ini", "n_antennas = 2\nn_users = 4\n");
  std::ostringstream out, err;
  CHECK(cmd_run({dir.path / "eps.ini", dir.path / "o", 1, std::nullopt}, out, err) == kExitConfig);
  CHECK(err.str().find("eps_grid") != std::string::npos);
  CHECK(cmd_check(dir.path / "users.ini", out, err) == kExitConfig);
  CHECK(cmd_check(dir.path / "missing.ini", out, err) == kExitConfig);
  CHECK(cmd_run({dir.path / "eps.ini", dir.path / "o", 0, std::nullopt}, out, err) == kExitConfig);
}

TEST_CASE("check prints the gain constants") {
  TempDir dir("check");
  write(dir.path / "a.ini", "eps_grid = 0.05\nnoise_var = 1\n");
  std::ostringstream out, err;
  REQUIRE(cmd_check(dir.path / "a.ini", out, err) == kExitOk);
  const GainConstants g = gain_constants(1.0, 0.05);
  char expect[64];
  std::snprintf(expect, sizeof expect, "alpha=%.6f", g.alpha);
  CHECK(out.str().find(expect) != std::string::npos);
  CHECK(out.str().find("alpha=1.58") != std::string::npos);
  CHECK(out.str().find("FAILED") == std::string::npos);
}

TEST_CASE("skipped SEP estimates are written as nan") {
  TempDir dir("nosep");
  write(dir.path / "a.ini", kBase.substr(0, kBase.find("sep_trials")) + "sep_trials = 0\neps_grid = 0.1\nschemes = zf\n");
  std::ostringstream out, err;
  REQUIRE(cmd_run({dir.path / "a.ini", dir.path / "o", 1, std::nullopt}, out, err) == kExitOk);
  const std::string results = slurp(dir.path / "o" / "results.csv");
  CHECK(results.find(",ZF,") != std::string::npos);
  CHECK(results.find(",nan,0\n") != std::string::npos);
  CHECK(slurp(dir.path / "o" / "summary.csv").find(",nan\n") != std::string::npos);
}

TEST_CASE("invalid thread count is a usage error") {
  TempDir dir("threads");
  write(dir.path / "a.ini", kSmall);
  std::ostringstream out, err;
  CHECK(cmd_run({dir.path / "a.ini", dir.path / "o", 0, std::nullopt}, out, err) == kExitUsage);
}

TEST_CASE("executable exit codes") {
  if (std::getenv("SLP_CLI") == nullptr) return;
  TempDir dir("exe");
  write(dir.path / "ok.ini", kSmall);
  write(dir.path / "eps.ini", "eps_grid = 0\n");
  write(dir.path / "users.ini", "n_antennas = 2\nn_users = 3\n");
  const std::string capped = kBase + "schemes = slp_block_peak\nfailure_budget = 0\n[block_solver]\nmax_iter = 1\n";
  write(dir.path / "capped.ini", capped);
  write(dir.path / "tolerant.ini",
        kBase + "schemes = slp_block_peak\nfailure_budget = 100\n[block_solver]\nmax_iter = 1\n");
  const std::string d = dir.path.string() + "/";

  CHECK(spawn("--version") == kExitOk);
  CHECK(spawn("") == kExitUsage);
  CHECK(spawn("run --config " + d + "ok.ini") == kExitUsage);
  CHECK(spawn("check --config " + d + "ok.ini") == kExitOk);
  CHECK(spawn("run --config " + d + "ok.ini --out " + d + "o --threads 2") == kExitOk);
  CHECK(spawn("run --config " + d + "eps.ini --out " + d + "o") == kExitConfig);
  CHECK(spawn("run --config " + d + "users.ini --out " + d + "o") == kExitConfig);
  CHECK(spawn("run --config " + d + "capped.ini --out " + d + "c") == kExitFailureBudget);
  CHECK(spawn("run --config " + d + "tolerant.ini --out " + d + "t") == kExitOk);
  const std::string env_run = "SLP_THREADS=2 \"" + std::string(std::getenv("SLP_CLI")) + "\" run --config " + d +
                              "ok.ini --out " + d + "e >/dev/null 2>&1";
  CHECK(std::system(env_run.c_str()) == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir.path / "e" / "manifest.json"));
  CHECK(manifest["threads"] == 2);
  write(dir.path / "blocker", "x");
  CHECK(spawn("run --config " + d + "ok.ini --out " + d + "blocker/sub") == kExitIo);
}
