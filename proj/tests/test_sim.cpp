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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "slp/errors.hpp"
#include "slp/sim_harness.hpp"

using namespace slp;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.n_antennas = 4;
  c.n_users = 3;
  c.block_len = 6;
  c.eps_grid = {0.1, 0.05, 0.01};
  c.n_channels = 3;
  c.sep_trials = 0;
  c.seed = 77;
  c.schemes = {{SchemeKind::ZF, 1.0},           {SchemeKind::LinearBF, 1.0},    {SchemeKind::SlpHeuristic, 1.0},
               {SchemeKind::SlpHeuristic, 1.2}, {SchemeKind::SlpBlockAvg, 1.0}, {SchemeKind::SlpBlockPeak, 1.0}};
  return c;
}

const SchemeResult& find(const TrialResult& t, SchemeKind kind, double zeta = 1.0) {
  for (const auto& s : t.schemes) {
    if (s.scheme.kind == kind && (kind != SchemeKind::SlpHeuristic || s.scheme.zeta == zeta)) return s;
  }
  throw std::runtime_error("scheme missing");
}

}  // namespace

TEST_CASE("gen_channel is reproducible with unit-variance circular entries") {
  CHECK(gen_channel(5, 3, 4).h_matrix() == gen_channel(5, 3, 4).h_matrix());
  CHECK(gen_channel(5, 3, 4).h_matrix() != gen_channel(6, 3, 4).h_matrix());
  CHECK_THROWS_AS(gen_channel(1, 5, 4), ChannelError);

  double sum_abs2 = 0.0, sum_re2 = 0.0, sum_im2 = 0.0, sum_reim = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const Eigen::MatrixXcd h = gen_channel(seed, 16, 16).h_matrix();
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      const auto z = h.data()[i];
      sum_abs2 += std::norm(z);
      sum_re2 += z.real() * z.real();
      sum_im2 += z.imag() * z.imag();
      sum_reim += z.real() * z.imag();
      ++count;
    }
  }
  const double n = static_cast<double>(count);
  // |h|^2 is Exp(1): variance 1; each squared part has variance 1/2 * 1/2 * 2 = 1/2 around 1/2
  CHECK(std::abs(sum_abs2 / n - 1.0) <= 3.0 / std::sqrt(n));
  CHECK(std::abs(sum_re2 / n - 0.5) <= 3.0 * std::sqrt(0.5) / std::sqrt(n));
  CHECK(std::abs(sum_im2 / n - 0.5) <= 3.0 * std::sqrt(0.5) / std::sqrt(n));
  CHECK(std::abs(sum_reim / n) <= 3.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("square 16 x 16 channels are full rank") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ChannelState ch = gen_channel(seed, 16, 16);
    CHECK(std::isfinite(ch.gram_condition()));
    CHECK(ch.gram_condition() >= 1.0);
  }
}

TEST_CASE("transmit_receive") {
  const ChannelState ch = gen_channel(3, 2, 3);
  std::mt19937_64 rng(1);
  const Eigen::MatrixXcd x = oracle::random_channel(rng, 3, 5);
  CHECK(transmit_receive(ch, x, 0.0, 9) == ch.h_matrix() * x);
  CHECK(transmit_receive(ch, x, 0.3, 9) == transmit_receive(ch, x, 0.3, 9));

  const int slots = 100000;
  const double sigma = 0.8;
  const Eigen::MatrixXcd y = transmit_receive(ch, Eigen::MatrixXcd::Zero(3, slots), sigma, 4);
  const Eigen::MatrixXcd cov = y * y.adjoint() / static_cast<double>(slots);
  const double s2 = sigma * sigma;
  const double se = s2 / std::sqrt(static_cast<double>(slots));
  CHECK(std::abs(cov(0, 0).real() - s2) <= 3.0 * se);
  CHECK(std::abs(cov(1, 1).real() - s2) <= 3.0 * se);
  // off-diagonal: each part has standard error s2 / sqrt(2 slots)
  CHECK(std::abs(cov(0, 1).real()) <= 3.0 * se / std::sqrt(2.0));
  CHECK(std::abs(cov(0, 1).imag()) <= 3.0 * se / std::sqrt(2.0));
}

TEST_CASE("estimate_sep: no errors without noise") {
  const ChannelState ch = gen_channel(11, 3, 4);
  const std::vector<QamSpec> specs(3, QamSpec(2));
  const SymbolBlock block = SymbolBlock::draw(specs, 5, 8);
  const Eigen::VectorXd d = Eigen::VectorXd::Constant(3, 2.0);
  Eigen::MatrixXcd x(4, 8);
  for (Eigen::Index t = 0; t < 8; ++t) x.col(t) = zf_precode(ch, GainVector(d), block.slot(t)).x;
  const SepEstimate est = estimate_sep(ch, x, d, specs, block, 1e-9, 1000, 3);
  CHECK(est.max() == 0.0);
  CHECK(est.trials == 1000);
}

TEST_CASE("estimate_sep: ZF at d = alpha on interior symbols hits the requirement") {
  const double eps = 0.05;
  const ChannelState ch = gen_channel(12, 2, 3);
  const std::vector<QamSpec> specs(2, QamSpec(2));
  SymbolBlock block(2, 10);
  for (int t = 0; t < 10; ++t) {
    block.at(0, t) = {t % 2 ? 1 : -1, 1};
    block.at(1, t) = {-1, t % 3 ? 1 : -1};
  }
  const GainConstants g = gain_constants(1.0, eps);
  const Eigen::VectorXd d = Eigen::VectorXd::Constant(2, g.alpha);
  Eigen::MatrixXcd x(3, 10);
  for (int t = 0; t < 10; ++t) x.col(t) = zf_precode(ch, GainVector(d), block.slot(t)).x;
  const std::size_t m = 1000000;
  const SepEstimate est = estimate_sep(ch, x, d, specs, block, 1.0, m, 21);
  // interior parts at zero residual: each axis fails with the per-part budget
  const double ep = oracle::per_part_eps(eps);
  const double expect = 1.0 - (1.0 - ep) * (1.0 - ep);
  const double se = std::sqrt(expect * (1 - expect) / static_cast<double>(m));
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(est.per_user[i] - expect) <= 3.0 * se);
    CHECK(est.std_err[i] == doctest::Approx(std::sqrt(est.per_user[i] * (1 - est.per_user[i]) / m)).epsilon(1e-12));
  }
}

TEST_CASE("estimate_sep: per-slot SLP meets the requirement within sampling error") {
  for (double eps : {0.05, 0.01}) {
    const ChannelState ch = gen_channel(13, 4, 4);
    const std::vector<QamSpec> specs(4, QamSpec(2));
    const SymbolBlock block = SymbolBlock::draw(specs, 8, 20);
    const std::vector<GainConstants> c(4, gain_constants(1.0, eps));
    const GainVector d = heuristic_gains(c, 1.0);
    Eigen::MatrixXcd x(4, 20);
    for (int t = 0; t < 20; ++t) x.col(t) = slp_per_symbol(ch, build_bounds(specs, block.slot(t), c), d, block.slot(t)).x;
    const std::size_t m = 200000;
    const SepEstimate est = estimate_sep(ch, x, d.values(), specs, block, 1.0, m, 5);
    CHECK(est.max() <= eps + 3.0 * std::sqrt(eps * (1 - eps) / m));
  }
}

TEST_CASE("ZF bookkeeping matches an independent recomputation") {
  SimConfig c = small_config();
  c.schemes = {{SchemeKind::ZF, 1.0}};
  const auto trials = run_experiment(c);
  REQUIRE(trials.size() == 9);
  for (const auto& tr : trials) {
    const Eigen::MatrixXcd h = realization_channel(c, tr.realization).h_matrix();
    const SymbolBlock block = realization_symbols(c, tr.realization);
    const Eigen::MatrixXcd pinv = h.completeOrthogonalDecomposition().pseudoInverse();
    const double alpha = oracle::alpha(1.0, tr.eps);
    double sum = 0.0;
    for (Eigen::Index t = 0; t < block.slots(); ++t) sum += (pinv * (alpha * symbol_vector(block.slot(t)))).squaredNorm();
    CHECK(tr.schemes[0].avg_power == doctest::Approx(sum / c.block_len).epsilon(1e-9));
  }
}

TEST_CASE("run_experiment: orderings, metric consistency and eps monotonicity") {
  const SimConfig c = small_config();
  const auto trials = run_experiment(c);
  REQUIRE(trials.size() == 9);
  for (const auto& tr : trials) {
    for (const auto& s : tr.schemes) {
      CHECK_FALSE(s.degraded);
      CHECK(s.peak_energy >= s.avg_power);
    }
    const double zf = find(tr, SchemeKind::ZF).avg_power;
    const double h1 = find(tr, SchemeKind::SlpHeuristic, 1.0).avg_power;
    const double avg = find(tr, SchemeKind::SlpBlockAvg).avg_power;
    CHECK(avg <= h1 * (1 + 1e-6));
    CHECK(h1 <= zf * (1 + 1e-12));
    CHECK(find(tr, SchemeKind::SlpBlockPeak).peak_energy <= find(tr, SchemeKind::SlpBlockAvg).peak_energy * (1 + 1e-5));
  }
  const auto rows = summarize(c, trials);
  REQUIRE(rows.size() == c.schemes.size() * c.eps_grid.size());
  for (std::size_t j = 0; j < c.schemes.size(); ++j) {
    for (std::size_t e = 1; e < c.eps_grid.size(); ++e) {
      // eps_grid is decreasing, so power must not drop along it
      CHECK(rows[j * 3 + e].mean_avg_power >= rows[j * 3 + e - 1].mean_avg_power * (1 - 1e-6));
    }
  }
}

TEST_CASE("summaries average over realizations") {
  const SimConfig c = small_config();
  const auto trials = run_experiment(c);
  const auto rows = summarize(c, trials);
  for (std::size_t j = 0; j < c.schemes.size(); ++j) {
    for (std::size_t e = 0; e < c.eps_grid.size(); ++e) {
      double sum = 0.0;
      for (const auto& tr : trials) {
        if (tr.eps_index == static_cast<int>(e)) sum += tr.schemes[j].avg_power;
      }
      const auto& row = rows[j * c.eps_grid.size() + e];
      CHECK(row.scheme == c.schemes[j].label());
      CHECK(row.eps == c.eps_grid[e]);
      CHECK(row.realizations == 3);
      CHECK(row.mean_avg_power == doctest::Approx(sum / 3.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("results do not depend on repetition or thread count") {
  SimConfig c = small_config();
  c.sep_trials = 3000;
  const auto a = run_experiment(c, 1);
  const auto b = run_experiment(c, 1);
  const auto p = run_experiment(c, 3);
  REQUIRE(a.size() == p.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].schemes.size(); ++j) {
      CHECK(a[i].schemes[j].avg_power == b[i].schemes[j].avg_power);
      CHECK(a[i].schemes[j].avg_power == p[i].schemes[j].avg_power);
      CHECK(a[i].schemes[j].peak_energy == p[i].schemes[j].peak_energy);
      CHECK(a[i].schemes[j].sep.per_user == p[i].schemes[j].sep.per_user);
    }
  }
}

TEST_CASE("a capped block solver marks the cell degraded and keeps it out of the means") {
  SimConfig c = small_config();
  c.schemes = {{SchemeKind::ZF, 1.0}, {SchemeKind::SlpBlockPeak, 1.0}};
  c.block_max_iter = 1;
  const auto trials = run_experiment(c);
  for (const auto& tr : trials) {
    CHECK_FALSE(tr.schemes[0].degraded);
    CHECK(tr.schemes[1].degraded);
  }
  const auto rows = summarize(c, trials);
  CHECK(rows[3].degraded == 3);
  CHECK(rows[3].realizations == 0);
  CHECK(std::isnan(rows[3].mean_avg_power));
}

TEST_CASE("SimConfig validation") {
  SimConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.n_users = 5;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = small_config();
  c.eps_grid = {0.0};
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = small_config();
  c.block_len = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = small_config();
  c.schemes.clear();
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}
