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

#include <Eigen/SVD>
#include <cmath>
#include <iostream>
#include <string>

#include "slp/errors.hpp"
#include "slp/precoders.hpp"

namespace slp {

ChannelState::ChannelState(Eigen::MatrixXcd h) : h_(std::move(h)), lifted_(Eigen::MatrixXd()) {
  const Eigen::Index k = h_.rows();
  const Eigen::Index n = h_.cols();
  if (k == 0 || k > n) {
    throw ChannelError("channel must have 1 <= K <= N (K=" + std::to_string(k) + ", N=" + std::to_string(n) +
                       ")");
  }
  if (!h_.allFinite()) throw ChannelError("channel has non-finite entries");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[k - 1];
  if (!(smin > 1e-10 * smax)) throw ChannelError("channel is rank deficient");

  const Eigen::VectorXd inv = sv.cwiseInverse();
  pinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
  gram_inv_ = svd.matrixU() * inv.cwiseAbs2().asDiagonal() * svd.matrixU().adjoint();
  gram_inv_ = (0.5 * (gram_inv_ + gram_inv_.adjoint())).eval();
  gram_cond_ = (smax / smin) * (smax / smin);
  if (gram_cond_ > 1e8) {
    std::clog << "warning: ill-conditioned channel, cond(HH^H) = " << gram_cond_ << '\n';
  }
  lifted_ = BoxQpSolver(lift_hermitian(gram_inv_));
}

GainVector::GainVector(Eigen::VectorXd d) : d_(std::move(d)) {
  if (!d_.allFinite() || (d_.size() > 0 && d_.minCoeff() <= 0.0)) {
    throw InvalidInput("gain factors must be positive and finite");
  }
}

}  // namespace slp
