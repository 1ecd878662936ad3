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

#include <cmath>
#include <complex>

#include "slp/errors.hpp"
#include "slp/precoders.hpp"

namespace slp {

Eigen::VectorXd BeamformerMatrix::effective_gains(const ChannelState& ch) const {
  const Eigen::MatrixXcd hw = ch.h_matrix() * w;
  return hw.diagonal().real();
}

BeamformerMatrix sinr_beamforming(const ChannelState& ch, const Eigen::VectorXd& targets,
                                  const Eigen::VectorXd& rho, double noise_var) {
  const Eigen::Index k = ch.users();
  const Eigen::Index n = ch.antennas();
  if (targets.size() != k || rho.size() != k) {
    throw InvalidInput("sinr_beamforming: one target and one symbol energy per user");
  }
  if (!(targets.minCoeff() > 0.0) || !(rho.minCoeff() > 0.0) || !(noise_var > 0.0)) {
    throw InvalidInput("sinr_beamforming: targets, symbol energies and noise variance must be positive");
  }
  // Column i is h_i, the uplink signature of user i.
  const Eigen::MatrixXcd hcols = ch.h_matrix().adjoint();

  // Uplink powers: q_i = gamma_i / (h_i^H Sigma_i^{-1} h_i) with
  // Sigma_i = noise I + sum_{j != i} q_j h_j h_j^H. By Sherman-Morrison,
  // h_i^H Sigma_i^{-1} h_i = c_i / (1 - q_i c_i) for c_i = h_i^H Sigma^{-1} h_i,
  // and Sigma_i^{-1} h_i is parallel to Sigma^{-1} h_i.
  Eigen::VectorXd q = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXcd sig_inv_h(n, k);
  auto update = [&](const Eigen::VectorXd& powers) {
    Eigen::MatrixXcd sigma = noise_var * Eigen::MatrixXcd::Identity(n, n);
    sigma.noalias() += hcols * powers.cast<cdouble>().asDiagonal() * hcols.adjoint();
    sig_inv_h = sigma.llt().solve(hcols);
    Eigen::VectorXd next(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double c = hcols.col(i).dot(sig_inv_h.col(i)).real();
      next[i] = targets[i] * (1.0 - powers[i] * c) / c;
    }
    return next;
  };

  int iters = 0;
  bool converged = false;
  for (; iters < 10000; ++iters) {
    const Eigen::VectorXd next = update(q);
    const double change = ((next - q).cwiseAbs().array() / next.array()).maxCoeff();
    q = next;
    if (change <= 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("sinr_beamforming: uplink power iteration did not converge");
  update(q);

  Eigen::MatrixXcd dirs(n, k);
  for (Eigen::Index i = 0; i < k; ++i) dirs.col(i) = sig_inv_h.col(i).normalized();

  // Downlink powers p with every constraint active:
  //   p_i g_ii / gamma_i - sum_{j != i} p_j g_ij = noise,  g_ij = |h_i^H w_j|^2.
  const Eigen::MatrixXd gain = (ch.h_matrix() * dirs).cwiseAbs2();
  Eigen::MatrixXd sys = -gain;
  for (Eigen::Index i = 0; i < k; ++i) sys(i, i) = gain(i, i) / targets[i];
  const Eigen::VectorXd p = sys.partialPivLu().solve(Eigen::VectorXd::Constant(k, noise_var));
  if (!p.allFinite() || p.minCoeff() <= 0.0) {
    throw ConvergenceError("sinr_beamforming: downlink power system has no positive solution");
  }

  BeamformerMatrix out;
  out.w.resize(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    // Rotate so h_i^H w_i is real and positive; SINR is phase-invariant.
    const cdouble hw = (ch.h_matrix().row(i) * dirs.col(i)).value();
    const cdouble phase = std::abs(hw) > 0.0 ? std::conj(hw) / std::abs(hw) : cdouble(1.0);
    out.w.col(i) = std::sqrt(p[i] / rho[i]) * phase * dirs.col(i);
  }
  const Eigen::MatrixXd rx = (ch.h_matrix() * out.w).cwiseAbs2();
  out.sinr_achieved.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double interference = noise_var;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != i) interference += rho[j] * rx(i, j);
    }
    out.sinr_achieved[i] = rho[i] * rx(i, i) / interference;
  }
  out.total_power = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) out.total_power += rho[i] * out.w.col(i).squaredNorm();
  out.iterations = iters + 1;
  return out;
}

}  // namespace slp
