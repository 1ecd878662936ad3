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
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "slp/errors.hpp"
#include "slp/sep_model.hpp"

using namespace slp;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("q_func matches the 50-digit reference") {
  CHECK(q_func(0.0) == 0.5);
  CHECK(q_func(kInf) == 0.0);
  CHECK(q_func(-kInf) == 1.0);
  CHECK(q_func(1.2816) == doctest::Approx(0.1).epsilon(1e-3));
  for (double x = 0.0; x <= 8.0; x += 0.125) {
    const double ref = oracle::q(x);
    CHECK(std::abs(q_func(x) - ref) <= 1e-12 * ref);
  }
  for (double x = -6.0; x <= 6.0; x += 0.1) CHECK(q_func(-x) == doctest::Approx(1.0 - q_func(x)).epsilon(1e-14));
  for (double x = -6.0; x < 6.0; x += 0.05) CHECK(q_func(x + 0.05) < q_func(x));
}

TEST_CASE("q_inv inverts q_func") {
  CHECK(std::abs(q_inv(0.5) - 0.0) <= 1e-12);
  CHECK(std::abs(q_inv(0.0126603) - 2.236) <= 1e-3);
  CHECK(std::abs(q_inv(0.0126603) - oracle::q_inv(0.0126603)) <= 1e-10);
  for (double x = -6.0; x <= 6.0; x += 0.01) CHECK(std::abs(q_inv(q_func(x)) - x) <= 1e-8);
  for (double p : {1e-12, 1e-8, 1e-4, 0.01, 0.2, 0.7, 0.99}) {
    CHECK(std::abs(q_func(q_inv(p)) - p) <= 1e-10);
  }
}

TEST_CASE("q_inv rejects probabilities outside (0, 1)") {
  CHECK_THROWS_AS(q_inv(0.0), DomainError);
  CHECK_THROWS_AS(q_inv(1.0), DomainError);
  CHECK_THROWS_AS(q_inv(-0.1), DomainError);
  CHECK_THROWS_AS(q_inv(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("per_part_eps") {
  CHECK(per_part_eps(0.0) == 0.0);
  CHECK(per_part_eps(1.0) == 1.0);
  CHECK(per_part_eps(0.05) == doctest::Approx(oracle::per_part_eps(0.05)).epsilon(1e-15));
  CHECK(per_part_eps(0.05) == doctest::Approx(0.0253206).epsilon(1e-6));
  for (double e : {1e-4, 1e-3, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5}) {
    const double ep = per_part_eps(e);
    CHECK(1.0 - (1.0 - ep) * (1.0 - ep) == doctest::Approx(e).epsilon(1e-13));
    CHECK(ep > 0.0);
    CHECK(ep < e);
  }
}

TEST_CASE("SepRequirement only accepts eps strictly inside (0, 1)") {
  CHECK(SepRequirement(0.05).per_part() == per_part_eps(0.05));
  CHECK_THROWS_AS(SepRequirement(0.0), DomainError);
  CHECK_THROWS_AS(SepRequirement(1.0), DomainError);
}

TEST_CASE("gain_constants") {
  const GainConstants g = gain_constants(1.0, 0.05);
  CHECK(g.alpha == doctest::Approx(oracle::alpha(1.0, 0.05)).epsilon(1e-10));
  CHECK(g.beta == doctest::Approx(oracle::beta(1.0, 0.05)).epsilon(1e-10));
  CHECK(std::abs(g.alpha - 1.581) <= 2e-3);
  CHECK(std::abs(g.beta - 1.382) <= 2e-3);

  const GainConstants g2 = gain_constants(2.0, 0.05);
  CHECK(g2.alpha == doctest::Approx(2.0 * g.alpha).epsilon(1e-14));
  CHECK(g2.beta == doctest::Approx(2.0 * g.beta).epsilon(1e-14));

  for (double e = 0.001; e < 1.0; e += 0.01) {
    const GainConstants c = gain_constants(1.0, e);
    CHECK(c.beta < c.alpha);
  }
  const GainConstants near_one = gain_constants(1.0, 1.0 - 1e-9);
  CHECK(near_one.alpha > 0.0);
  CHECK(near_one.alpha < 0.7);
  CHECK(near_one.beta < 0.0);  // negative once the per-part budget exceeds 1/2
  CHECK_THROWS_AS(gain_constants(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(gain_constants(0.0, 0.05), InvalidInput);
}

TEST_CASE("build_bounds follows the interior / edge table") {
  const GainConstants g = gain_constants(1.0, 0.05);
  const std::vector<GainConstants> gains{g, g};
  const std::vector<QamSpec> specs{QamSpec(2), QamSpec(2)};
  const std::vector<Symbol> syms{{1, 1}, {3, -3}};
  const SepBounds b = build_bounds(specs, syms, gains);
  REQUIRE(b.users() == 2);
  CHECK(b.a_re[0] == OffsetBound::finite(g.alpha));
  CHECK(b.a_im[0] == OffsetBound::finite(g.alpha));
  CHECK(b.c_re[0] == OffsetBound::finite(g.alpha));
  CHECK(b.c_im[0] == OffsetBound::finite(g.alpha));
  CHECK(b.a_re[1] == OffsetBound::finite(g.beta));
  CHECK(b.c_re[1] == OffsetBound::unbounded());
  CHECK(b.a_im[1] == OffsetBound::unbounded());
  CHECK(b.c_im[1] == OffsetBound::finite(g.beta));
  CHECK(b.c_re[1].as_double() == -kInf);

  const std::vector<QamSpec> qpsk{QamSpec(1)};
  const std::vector<Symbol> s1{{1, 1}};
  const std::vector<GainConstants> g1{g};
  const SepBounds b1 = build_bounds(qpsk, s1, g1);
  CHECK(b1.a_re[0] == OffsetBound::finite(g.beta));
  CHECK(b1.c_re[0] == OffsetBound::unbounded());

  const std::vector<Symbol> bad{{2, 1}};
  CHECK_THROWS_AS(build_bounds(qpsk, bad, g1), InvalidInput);
}

TEST_CASE("analytic_sep_part closed forms") {
  const double s = 1.3;
  const double d = 2.1;
  const double r2 = std::sqrt(2.0);
  CHECK(analytic_sep_part(d, 0.0, s, PartClass::Interior) ==
        doctest::Approx(2.0 * oracle::q(r2 * d / s)).epsilon(1e-12));
  CHECK(analytic_sep_part(d, 0.4, s, PartClass::Interior) ==
        doctest::Approx(oracle::q(r2 * (d - 0.4) / s) + oracle::q(r2 * (d + 0.4) / s)).epsilon(1e-12));
  CHECK(analytic_sep_part(d, 0.4, s, PartClass::PosEdge) == doctest::Approx(oracle::q(r2 * (d + 0.4) / s)).epsilon(1e-12));
  CHECK(analytic_sep_part(d, 0.4, s, PartClass::NegEdge) == doctest::Approx(oracle::q(r2 * (d - 0.4) / s)).epsilon(1e-12));

  for (double eps : {0.1, 0.05, 0.01, 0.005}) {
    const GainConstants g = gain_constants(1.0, eps);
    const double ep = per_part_eps(eps);
    CHECK(analytic_sep_part(g.alpha, 0.0, 1.0, PartClass::Interior) == doctest::Approx(ep).epsilon(1e-10));
    CHECK(analytic_sep_part(g.alpha, g.beta - g.alpha, 1.0, PartClass::PosEdge) == doctest::Approx(ep).epsilon(1e-10));
    CHECK(analytic_sep_part(g.alpha, g.alpha - g.beta, 1.0, PartClass::NegEdge) == doctest::Approx(ep).epsilon(1e-10));
  }
}

TEST_CASE("residuals inside the bound interval keep the per-part SEP within budget") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (double eps : {0.1, 0.05, 0.01}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const GainConstants g = gain_constants(sigma, eps);
      const double ep = per_part_eps(eps);
      for (int k = 0; k < 200; ++k) {
        const double d = g.alpha * (1.0 + 2.0 * u01(rng));
        // interior: b in [-d + alpha, d - alpha]
        const double lo_i = -d + g.alpha, hi_i = d - g.alpha;
        for (double b : {lo_i, hi_i, lo_i + (hi_i - lo_i) * u01(rng)}) {
          CHECK(analytic_sep_part(d, b, sigma, PartClass::Interior) <= ep * (1 + 1e-9));
        }
        // positive edge: b >= -d + beta, upper side open
        const double lo_p = -d + g.beta;
        for (double b : {lo_p, lo_p + 5.0 * u01(rng)}) {
          CHECK(analytic_sep_part(d, b, sigma, PartClass::PosEdge) <= ep * (1 + 1e-9));
        }
        const double hi_n = d - g.beta;
        for (double b : {hi_n, hi_n - 5.0 * u01(rng)}) {
          CHECK(analytic_sep_part(d, b, sigma, PartClass::NegEdge) <= ep * (1 + 1e-9));
        }
      }
    }
  }
}

TEST_CASE("analytic_sep_part agrees with a per-axis Monte Carlo count") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int draws = 200000;
  for (int trial = 0; trial < 12; ++trial) {
    const double sigma = 0.5 + u01(rng);
    const double d = 0.5 + 1.5 * u01(rng);
    const double b = (u01(rng) - 0.5) * d;
    const auto cls = static_cast<PartClass>(trial % 3);
    std::normal_distribution<double> noise(0.0, sigma / std::sqrt(2.0));
    int errors = 0;
    for (int k = 0; k < draws; ++k) {
      const double e = b + noise(rng);
      const bool wrong = cls == PartClass::Interior ? std::abs(e) > d
                         : cls == PartClass::PosEdge ? e < -d
                                                     : e > d;
      errors += wrong ? 1 : 0;
    }
    const double p = analytic_sep_part(d, b, sigma, cls);
    const double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(static_cast<double>(errors) / draws - p) <= 4.0 * se + 1e-6);
  }
}

TEST_CASE("analytic_sep_symbol") {
  CHECK(analytic_sep_symbol(0.0, 0.0) == 0.0);
  CHECK(analytic_sep_symbol(0.01, 0.02) == doctest::Approx(0.0298).epsilon(1e-12));
  for (double e : {0.1, 0.05, 0.01}) {
    const double ep = per_part_eps(e);
    CHECK(analytic_sep_symbol(ep, ep) == doctest::Approx(e).epsilon(1e-13));
  }
}

TEST_CASE("sinr_target_from_sep") {
  const double ref = 5.0 * std::pow(oracle::q_inv(oracle::per_part_eps(0.05) / 2), 2);
  CHECK(sinr_target_from_sep(10.0, 0.05) == doctest::Approx(ref).epsilon(1e-10));
  CHECK(std::abs(sinr_target_from_sep(10.0, 0.05) - 25.0) <= 0.1);
  CHECK(sinr_target_from_sep(20.0, 0.05) == doctest::Approx(2.0 * sinr_target_from_sep(10.0, 0.05)).epsilon(1e-14));
  const double small = sinr_target_from_sep(10.0, 1.0 - 1e-9);
  CHECK(small > 0.0);
  CHECK(small < 2.5);
  CHECK_THROWS_AS(sinr_target_from_sep(10.0, 0.0), DomainError);
  CHECK_THROWS_AS(sinr_target_from_sep(0.0, 0.05), InvalidInput);
}
