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
#include <map>
#include <set>

#include "oracles.hpp"
#include "slp/constellation.hpp"
#include "slp/errors.hpp"

using namespace slp;

TEST_CASE("enumerate_points lists the smallest constellation in lexicographic order") {
  const auto pts = enumerate_points(QamSpec(1));
  REQUIRE(pts.size() == 4);
  CHECK(pts[0] == Symbol{-1, -1});
  CHECK(pts[1] == Symbol{-1, 1});
  CHECK(pts[2] == Symbol{1, -1});
  CHECK(pts[3] == Symbol{1, 1});
}

TEST_CASE("16-point constellation uses parts in {+-1, +-3}") {
  const QamSpec spec(2);
  const auto pts = enumerate_points(spec);
  REQUIRE(pts.size() == 16);
  CHECK(spec.order() == 16);
  std::set<std::pair<int, int>> seen;
  for (const auto& s : pts) {
    for (int part : {s.re, s.im}) CHECK((std::abs(part) == 1 || std::abs(part) == 3));
    seen.insert({s.re, s.im});
  }
  CHECK(seen.size() == 16);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(std::make_pair(pts[i - 1].re, pts[i - 1].im) < std::make_pair(pts[i].re, pts[i].im));
  }
}

TEST_CASE("average energy equals the mean of |s|^2 over the enumeration") {
  for (int level = 1; level <= 6; ++level) {
    const QamSpec spec(level);
    double sum = 0.0;
    for (const auto& s : enumerate_points(spec)) sum += std::norm(s.value());
    CHECK(spec.avg_energy() == doctest::Approx(sum / spec.order()).epsilon(1e-14));
    double sq = 0.0;
    for (int v = 1; v <= 2 * level - 1; v += 2) sq += v * v;
    CHECK(spec.avg_energy() == doctest::Approx(2.0 * sq / level).epsilon(1e-14));
  }
  CHECK(QamSpec(1).avg_energy() == 2.0);
  CHECK(QamSpec(2).avg_energy() == 10.0);
}

TEST_CASE("QamSpec rejects a non-positive level count") {
  CHECK_THROWS_AS(QamSpec(0), InvalidInput);
  CHECK_THROWS_AS(QamSpec(-3), InvalidInput);
}

TEST_CASE("decide picks the nearest point and clips at the edge") {
  const QamSpec spec(2);
  CHECK(decide(spec, {0.2, 0.3}) == Symbol{1, 1});
  CHECK(decide(spec, {5.0, 5.0}) == Symbol{3, 3});
  CHECK(decide(spec, {-7.5, 2.9}) == Symbol{-3, 3});
}

TEST_CASE("decide breaks midpoint ties toward the smaller magnitude") {
  const QamSpec spec(2);
  CHECK(decide(spec, {2.0, 0.5}) == Symbol{1, 1});
  CHECK(decide(spec, {-2.0, 0.0}) == Symbol{-1, 1});
  CHECK(decide(spec, {0.0, -2.0}) == Symbol{1, -1});
}

TEST_CASE("decide agrees with brute-force nearest search on a tie-heavy grid") {
  for (int level = 1; level <= 4; ++level) {
    const QamSpec spec(level);
    const double span = 2.0 * level + 1.0;
    for (double re = -span; re <= span; re += 0.25) {
      for (double im = -span; im <= span; im += 0.25) {
        const Symbol got = decide(spec, {re, im});
        CHECK(got.re == oracle::nearest_level(re, level));
        CHECK(got.im == oracle::nearest_level(im, level));
      }
    }
  }
}

TEST_CASE("decide is idempotent on constellation points and always returns a member") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int level = 1; level <= 4; ++level) {
    const QamSpec spec(level);
    for (const auto& s : enumerate_points(spec)) CHECK(decide(spec, s.value()) == s);
    for (int k = 0; k < 500; ++k) CHECK(spec.contains(decide(spec, {u(rng), u(rng)})));
  }
}

TEST_CASE("decide rejects non-finite input") {
  const QamSpec spec(2);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(decide(spec, {nan, 0.0}), InvalidInput);
  CHECK_THROWS_AS(decide(spec, {0.0, inf}), InvalidInput);
}

TEST_CASE("classify_part") {
  CHECK(classify_part(QamSpec(2), 1) == PartClass::Interior);
  CHECK(classify_part(QamSpec(2), -1) == PartClass::Interior);
  CHECK(classify_part(QamSpec(2), 3) == PartClass::PosEdge);
  CHECK(classify_part(QamSpec(2), -3) == PartClass::NegEdge);
  CHECK(classify_part(QamSpec(1), 1) == PartClass::PosEdge);
  CHECK(classify_part(QamSpec(1), -1) == PartClass::NegEdge);
  CHECK_THROWS_AS(classify_part(QamSpec(2), 2), InvalidInput);
  CHECK_THROWS_AS(classify_part(QamSpec(2), 5), InvalidInput);

  // one class per level
  for (int level = 1; level <= 5; ++level) {
    const QamSpec spec(level);
    int interior = 0, pos = 0, neg = 0;
    for (int v = -(2 * level - 1); v <= 2 * level - 1; v += 2) {
      switch (classify_part(spec, v)) {
        case PartClass::Interior: ++interior; break;
        case PartClass::PosEdge: ++pos; break;
        case PartClass::NegEdge: ++neg; break;
      }
    }
    CHECK(pos == 1);
    CHECK(neg == 1);
    CHECK(interior == 2 * level - 2);
  }
}

TEST_CASE("draw_symbols") {
  const QamSpec spec(2);
  CHECK(draw_symbols(spec, 9, 0).empty());
  CHECK(draw_symbols(spec, 9, 1000) == draw_symbols(spec, 9, 1000));
  CHECK(draw_symbols(spec, 9, 1000) != draw_symbols(spec, 10, 1000));

  const std::size_t n = 100000;
  const auto draws = draw_symbols(spec, 12345, n);
  std::map<std::pair<int, int>, int> counts;
  for (const auto& s : draws) {
    CHECK(spec.contains(s));
    ++counts[{s.re, s.im}];
  }
  REQUIRE(counts.size() == 16);
  const double p = 1.0 / 16.0;
  const double sd = std::sqrt(n * p * (1 - p));
  for (const auto& [pt, c] : counts) CHECK(std::abs(c - n * p) <= 5.0 * sd);
}
