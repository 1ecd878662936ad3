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

#include "slp/sep_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "slp/errors.hpp"

namespace slp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

double q_func(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("q_inv: probability " + std::to_string(p) + " is outside (0, 1)");
  }
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -q_inv(1.0 - p);

  // Root of log Q(x) - log p on a bracket, Newton steps with bisection
  // whenever a step leaves the bracket. Q(38.5) is below the smallest
  // subnormal, so the bracket covers every representable p.
  double lo = 0.0;
  double hi = 38.5;
  double x = std::sqrt(-2.0 * std::log(p));
  if (x >= hi) x = 0.5 * (lo + hi);
  const double log_p = std::log(p);
  for (int iter = 0; iter < 200; ++iter) {
    const double q = q_func(x);
    if (q > p) {
      lo = x;
    } else {
      hi = x;
    }
    double next;
    if (q > 0.0) {
      // d/dx log Q(x) = -phi(x) / Q(x)
      const double f = std::log(q) - log_p;
      next = x + f * q / normal_pdf(x);
    } else {
      next = 0.5 * (lo + hi);
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-13 * std::max(1.0, std::fabs(x)) || hi - lo <= 1e-14) {
      return next;
    }
    x = next;
  }
  return x;
}

double per_part_eps(double eps) {
  // 1 - sqrt(1 - e) = e / (1 + sqrt(1 - e)) without the cancellation.
  return eps / (1.0 + std::sqrt(1.0 - eps));
}

SepRequirement::SepRequirement(double eps) : eps_(eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("SEP requirement " + std::to_string(eps) +
                      " is outside (0, 1): unattainable SEP requirement");
  }
}

GainConstants gain_constants(double noise_std, double eps) {
  if (!(noise_std > 0.0) || !std::isfinite(noise_std)) {
    throw InvalidInput("gain_constants: noise std must be positive and finite");
  }
  const SepRequirement req(eps);
  const double eps_part = req.per_part();
  const double scale = noise_std / std::numbers::sqrt2;
  return {scale * q_inv(0.5 * eps_part), scale * q_inv(eps_part), noise_std};
}

double OffsetBound::as_double() const { return finite_ ? value_ : -kInf; }

SepBounds build_bounds(std::span<const QamSpec> specs, std::span<const Symbol> symbols,
                       std::span<const GainConstants> gains) {
  const std::size_t k = symbols.size();
  if (specs.size() != k || gains.size() != k) {
    throw InvalidInput("build_bounds: specs, symbols and gains must have one entry per user");
  }
  SepBounds out;
  for (auto* v : {&out.a_re, &out.a_im, &out.c_re, &out.c_im}) v->reserve(k);

  auto fill = [](PartClass cls, const GainConstants& g, std::vector<OffsetBound>& a,
                 std::vector<OffsetBound>& c) {
    switch (cls) {
      case PartClass::Interior:
        a.push_back(OffsetBound::finite(g.alpha));
        c.push_back(OffsetBound::finite(g.alpha));
        break;
      case PartClass::PosEdge:
        a.push_back(OffsetBound::finite(g.beta));
        c.push_back(OffsetBound::unbounded());
        break;
      case PartClass::NegEdge:
        a.push_back(OffsetBound::unbounded());
        c.push_back(OffsetBound::finite(g.beta));
        break;
    }
  };

  for (std::size_t i = 0; i < k; ++i) {
    if (!specs[i].contains(symbols[i])) {
      throw InvalidInput("build_bounds: symbol of user " + std::to_string(i) +
                         " is not a constellation point");
    }
    fill(classify_part(specs[i], symbols[i].re), gains[i], out.a_re, out.c_re);
    fill(classify_part(specs[i], symbols[i].im), gains[i], out.a_im, out.c_im);
  }
  return out;
}

double analytic_sep_part(double d, double b_part, double noise_std, PartClass cls) {
  const double k = std::numbers::sqrt2 / noise_std;
  switch (cls) {
    case PartClass::Interior:
      return q_func(k * (d - b_part)) + q_func(k * (d + b_part));
    case PartClass::PosEdge:
      return q_func(k * (d + b_part));
    case PartClass::NegEdge:
      return q_func(k * (d - b_part));
  }
  return 1.0;
}

double analytic_sep_symbol(double sep_re, double sep_im) {
  return 1.0 - (1.0 - sep_re) * (1.0 - sep_im);
}

double sinr_target_from_sep(double avg_energy, double eps) {
  if (!(avg_energy > 0.0)) throw InvalidInput("sinr_target_from_sep: avg energy must be positive");
  const SepRequirement req(eps);
  const double z = q_inv(0.5 * req.per_part());
  return 0.5 * avg_energy * z * z;
}

}  // namespace slp
