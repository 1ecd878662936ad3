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

#include "slp/errors.hpp"
#include "slp/qp_solver.hpp"

namespace slp {

Eigen::MatrixXd lift_hermitian(const Eigen::MatrixXcd& r) {
  const Eigen::Index k = r.rows();
  Eigen::MatrixXd out(2 * k, 2 * k);
  out.topLeftCorner(k, k) = r.real();
  out.topRightCorner(k, k) = -r.imag();
  out.bottomLeftCorner(k, k) = r.imag();
  out.bottomRightCorner(k, k) = r.real();
  return out;
}

Eigen::VectorXd stack_re_im(const Eigen::VectorXcd& z) {
  Eigen::VectorXd v(2 * z.size());
  v << z.real(), z.imag();
  return v;
}

Eigen::VectorXcd unstack_re_im(const Eigen::VectorXd& v) {
  const Eigen::Index k = v.size() / 2;
  Eigen::VectorXcd z(k);
  z.real() = v.head(k);
  z.imag() = v.tail(k);
  return z;
}

LiftedQuadratic lift_complex_quadratic(const Eigen::MatrixXd& lifted_r,
                                       const Eigen::VectorXcd& shift) {
  if (lifted_r.rows() != 2 * shift.size() || lifted_r.cols() != lifted_r.rows()) {
    throw InvalidInput("lift_complex_quadratic: dimension mismatch");
  }
  const Eigen::VectorXd z0 = stack_re_im(shift);
  const Eigen::VectorXd pz0 = lifted_r * z0;
  return {lifted_r, 2.0 * pz0, z0.dot(pz0)};
}

LiftedQuadratic lift_complex_quadratic(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& shift) {
  if (r.rows() != r.cols() || r.rows() != shift.size()) {
    throw InvalidInput("lift_complex_quadratic: dimension mismatch");
  }
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidInput("lift_complex_quadratic: matrix is not Hermitian");
  }
  return lift_complex_quadratic(lift_hermitian(r), shift);
}

}  // namespace slp
