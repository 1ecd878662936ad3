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

#include "slp/constellation.hpp"

#include <cmath>
#include <random>
#include <string>

#include "slp/errors.hpp"
#include "slp/random.hpp"

namespace slp {

QamSpec::QamSpec(int level_count) : level_count_(level_count) {
  if (level_count < 1) {
    throw InvalidInput("QAM level count must be >= 1, got " + std::to_string(level_count));
  }
}

double QamSpec::avg_energy() const {
  // |s|^2 = re^2 + im^2 and both axes are uniform over the same levels.
  double sum_sq = 0.0;
  for (int k = 1; k <= max_level(); k += 2) sum_sq += static_cast<double>(k) * k;
  return 2.0 * sum_sq / level_count_;
}

bool QamSpec::is_level(int part) const {
  const int a = part < 0 ? -part : part;
  return (a % 2 == 1) && a <= max_level();
}

std::vector<Symbol> enumerate_points(const QamSpec& spec) {
  std::vector<Symbol> points;
  points.reserve(static_cast<std::size_t>(spec.order()));
  const int m = spec.max_level();
  for (int re = -m; re <= m; re += 2) {
    for (int im = -m; im <= m; im += 2) points.push_back({re, im});
  }
  return points;
}

namespace {

int decide_axis(double x, int max_level) {
  const double a = std::fabs(x);
  // (2k-2, 2k] -> 2k-1, which puts even-integer ties on the smaller level.
  double level = 2.0 * std::ceil(a / 2.0) - 1.0;
  if (level < 1.0) level = 1.0;
  if (level > max_level) level = max_level;
  const int l = static_cast<int>(level);
  return std::signbit(x) && a > 0.0 ? -l : l;
}

}  // namespace

Symbol decide(const QamSpec& spec, cdouble z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InvalidInput("decide: non-finite sample");
  }
  return {decide_axis(z.real(), spec.max_level()), decide_axis(z.imag(), spec.max_level())};
}

PartClass classify_part(const QamSpec& spec, int part) {
  if (!spec.is_level(part)) {
    throw InvalidInput("classify_part: " + std::to_string(part) + " is not a level of " +
                       std::to_string(spec.order()) + "-QAM");
  }
  if (part == spec.max_level()) return PartClass::PosEdge;
  if (part == -spec.max_level()) return PartClass::NegEdge;
  return PartClass::Interior;
}

std::vector<Symbol> draw_symbols(const QamSpec& spec, std::uint64_t seed, std::size_t count) {
  const auto points = enumerate_points(spec);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  std::vector<Symbol> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) out.push_back(points[pick(rng)]);
  return out;
}

}  // namespace slp
