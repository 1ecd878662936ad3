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

#ifndef SLP_PRECODERS_HPP
#define SLP_PRECODERS_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "slp/constellation.hpp"
#include "slp/qp_solver.hpp"
#include "slp/sep_model.hpp"

namespace slp {

/// Downlink channel H (K x N, row i is h_i^H) with its pseudo-inverse
/// H^+ = H^H (H H^H)^{-1} and R = (H H^H)^{-1}, both from one SVD.
/// Immutable after construction.
class ChannelState {
 public:
  /// Throws ChannelError when K > N or the smallest singular value is not
  /// above 1e-10 times the largest.
  explicit ChannelState(Eigen::MatrixXcd h);

  Eigen::Index users() const { return h_.rows(); }
  Eigen::Index antennas() const { return h_.cols(); }

  const Eigen::MatrixXcd& h_matrix() const { return h_; }
  const Eigen::MatrixXcd& pseudo_inverse() const { return pinv_; }
  const Eigen::MatrixXcd& gram_inverse() const { return gram_inv_; }
  /// Condition number of H H^H.
  double gram_condition() const { return gram_cond_; }

  /// Lifted R shared by every per-slot box QP on this channel.
  const BoxQpSolver& lifted_gram() const { return lifted_; }

 private:
  Eigen::MatrixXcd h_;
  Eigen::MatrixXcd pinv_;
  Eigen::MatrixXcd gram_inv_;
  double gram_cond_ = 1.0;
  BoxQpSolver lifted_;
};

/// Receive gains d_i > 0, one per user.
class GainVector {
 public:
  explicit GainVector(Eigen::VectorXd d);
  const Eigen::VectorXd& values() const { return d_; }
  Eigen::Index size() const { return d_.size(); }
  double operator[](Eigen::Index i) const { return d_[i]; }

 private:
  Eigen::VectorXd d_;
};

struct PrecodeOutput {
  Eigen::VectorXcd x;
  /// Symbol perturbation, zero for plain ZF.
  Eigen::VectorXcd u;
  double energy = 0.0;
  /// H x - D s.
  Eigen::VectorXcd residual;
  std::optional<SolveReport> report;
};

struct BeamformerMatrix {
  Eigen::MatrixXcd w;
  Eigen::VectorXd sinr_achieved;
  double total_power = 0.0;
  int iterations = 0;

  /// h_i^H w_i, real and positive after the phase normalization applied by
  /// sinr_beamforming. Used as the receive gain for detection.
  Eigen::VectorXd effective_gains(const ChannelState& ch) const;
};

/// Symbols of one transmission block, stored slot by slot.
class SymbolBlock {
 public:
  SymbolBlock(Eigen::Index users, Eigen::Index slots);
  /// Draws user i's stream from seed + i.
  static SymbolBlock draw(std::span<const QamSpec> specs, std::uint64_t seed, Eigen::Index slots);

  Eigen::Index users() const { return users_; }
  Eigen::Index slots() const { return slots_; }
  Symbol& at(Eigen::Index user, Eigen::Index slot) { return data_[idx(user, slot)]; }
  const Symbol& at(Eigen::Index user, Eigen::Index slot) const { return data_[idx(user, slot)]; }
  std::span<const Symbol> slot(Eigen::Index t) const {
    return {data_.data() + static_cast<std::size_t>(t * users_), static_cast<std::size_t>(users_)};
  }

 private:
  std::size_t idx(Eigen::Index user, Eigen::Index slot) const {
    return static_cast<std::size_t>(slot * users_ + user);
  }
  Eigen::Index users_;
  Eigen::Index slots_;
  std::vector<Symbol> data_;
};

/// Complex vector of the symbol values.
Eigen::VectorXcd symbol_vector(std::span<const Symbol> s);

struct BlockDesign {
  Eigen::VectorXd gains;
  /// K x T perturbations, column t is u_t.
  Eigen::MatrixXcd perturbations;
  /// N x T transmit signals.
  Eigen::MatrixXcd signals;
  double avg_power = 0.0;
  double peak_energy = 0.0;
  SolveReport report;
};

PrecodeOutput zf_precode(const ChannelState& ch, const GainVector& gains, std::span<const Symbol> s);

/// Energy-minimal SLP for one slot, solved as the box QP over the symbol
/// perturbation u and mapped back through x = H^+ (D s + u). Throws
/// InfeasibleGains when some residual interval is empty.
PrecodeOutput slp_per_symbol(const ChannelState& ch, const SepBounds& bounds, const GainVector& gains,
                             std::span<const Symbol> s, const BoxQpOptions& opts = {});

/// The same design solved directly over x in C^N as a linear-inequality QP.
/// Slower; exists to cross-check slp_per_symbol.
PrecodeOutput slp_direct(const ChannelState& ch, const SepBounds& bounds, const GainVector& gains,
                         std::span<const Symbol> s, const IneqQpOptions& opts = {});

/// Rewrites x = W s as H^+ (D s + u) with u = (H W - D) s. Throws
/// PreconditionError unless every column of W is in the row space of H.
PrecodeOutput linear_bf_as_perturbed_zf(const ChannelState& ch, const BeamformerMatrix& w,
                                        const GainVector& gains, std::span<const Symbol> s);

/// Minimum-power linear beamformer meeting SINR_i >= targets[i].
/// Uplink fixed-point power iteration with MMSE directions, then a K x K
/// solve for the downlink powers. Throws ConvergenceError after 10^4
/// iterations.
BeamformerMatrix sinr_beamforming(const ChannelState& ch, const Eigen::VectorXd& targets,
                                  const Eigen::VectorXd& rho, double noise_var);

/// d_i = zeta * alpha_i. Throws InvalidInput for zeta < 1.
GainVector heuristic_gains(std::span<const GainConstants> constants, double zeta);

/// Joint (d, u_1..u_T) minimizing the block average power.
BlockDesign block_average_design(const ChannelState& ch, std::span<const QamSpec> specs,
                                 const SymbolBlock& block, std::span<const GainConstants> constants,
                                 const IneqQpOptions& opts = {});

/// Joint (d, u_1..u_T) minimizing the block peak energy.
BlockDesign block_peak_design(const ChannelState& ch, std::span<const QamSpec> specs,
                              const SymbolBlock& block, std::span<const GainConstants> constants,
                              const MinMaxOptions& opts = {});

/// Largest violation of the per-slot residual intervals at x, recomputed
/// from H, x, d, s and the bounds.
double bound_violation(const ChannelState& ch, const SepBounds& bounds, const Eigen::VectorXd& d,
                       std::span<const Symbol> s, const Eigen::VectorXcd& x);

}  // namespace slp

#endif  // SLP_PRECODERS_HPP
