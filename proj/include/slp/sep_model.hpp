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

#ifndef SLP_SEP_MODEL_HPP
#define SLP_SEP_MODEL_HPP

#include <span>
#include <vector>

#include "slp/constellation.hpp"

namespace slp {

/// Gaussian tail Pr(Z > x) for standard normal Z. Defined on the extended
/// reals: q_func(-inf) = 1, q_func(+inf) = 0.
double q_func(double x);

/// Inverse of q_func on (0, 1). Throws DomainError outside the open
/// interval, which is how an unattainable (eps = 0) or vacuous (eps = 1)
/// SEP requirement surfaces.
double q_inv(double p);

/// Per-axis error budget 1 - sqrt(1 - eps). Meeting it on both the real and
/// the imaginary axis meets eps for the symbol.
double per_part_eps(double eps);

/// Validated symbol error requirement for one user.
class SepRequirement {
 public:
  explicit SepRequirement(double eps);
  double eps() const { return eps_; }
  double per_part() const { return per_part_eps(eps_); }

 private:
  double eps_;
};

/// Residual margins for one user at noise level noise_std.
///   alpha: margin on an interior coordinate (two-sided error region)
///   beta:  margin on an edge coordinate (one-sided error region)
struct GainConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double noise_std = 1.0;
};

GainConstants gain_constants(double noise_std, double eps);

/// Lower offset of a residual interval: either a finite value or -inf.
/// Kept as an explicit marker so no sentinel magnitude reaches a solver.
class OffsetBound {
 public:
  static OffsetBound unbounded() { return OffsetBound(); }
  static OffsetBound finite(double v) { return OffsetBound(v); }

  bool is_finite() const { return finite_; }
  /// Only meaningful when is_finite().
  double value() const { return value_; }
  /// IEEE view, -inf when unbounded.
  double as_double() const;

  friend bool operator==(const OffsetBound&, const OffsetBound&) = default;

 private:
  OffsetBound() = default;
  explicit OffsetBound(double v) : finite_(true), value_(v) {}
  bool finite_ = false;
  double value_ = 0.0;
};

/// Per-slot SEP constraint data. For user i and axis p in {re, im} the
/// residual b = h_i^H x - d_i s_i must satisfy
///   -d_i + a_p[i] <= p(b) <= d_i - c_p[i].
struct SepBounds {
  std::vector<OffsetBound> a_re, a_im, c_re, c_im;

  std::size_t users() const { return a_re.size(); }
};

SepBounds build_bounds(std::span<const QamSpec> specs, std::span<const Symbol> symbols,
                       std::span<const GainConstants> gains);

/// Conditional error probability of one axis given the signed residual
/// b_part on that axis, for receive gain d and noise std noise_std.
double analytic_sep_part(double d, double b_part, double noise_std, PartClass cls);

/// Symbol error from per-axis errors, exact for independent axis noise.
double analytic_sep_symbol(double sep_re, double sep_im);

/// SINR target that makes SINR-constrained linear beamforming meet eps,
/// under a Gaussian model of the multiuser interference.
double sinr_target_from_sep(double avg_energy, double eps);

}  // namespace slp

#endif  // SLP_SEP_MODEL_HPP
