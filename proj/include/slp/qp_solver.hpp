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

#ifndef SLP_QP_SOLVER_HPP
#define SLP_QP_SOLVER_HPP

/**
 * @file
 * @brief Dense-scale convex solvers used by the precoders.
 *
 * Every quadratic in this module is written f(x) = x^T P x + q^T x + r
 * (no factor 1/2), so the gradient is 2 P x + q.
 *
 * Three problem classes are covered:
 *  - BoxQp: bound constraints only, accelerated projected gradient with an
 *    active-set polish.
 *  - IneqQp: A x <= b, alternating direction method (scaled, fixed rho)
 *    with an active-set polish.
 *  - MinMaxQp: minimize max_t f_t(x) s.t. A x <= b, through the epigraph
 *    variable and a primal-dual interior method on the slack form.
 */

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <string>
#include <vector>

namespace slp {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class SolveStatus { Optimal, MaxIter, Infeasible };

const char* to_string(SolveStatus s);

struct SolveReport {
  Eigen::VectorXd solution;
  double objective = 0.0;
  /// Largest of the normalized stationarity, primal feasibility and
  /// complementarity residuals (box solver: projected-gradient residual).
  double kkt_residual = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIter;
  /// Multipliers of the linear constraints, when the solver produces them.
  Eigen::VectorXd duals;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

// ---------------------------------------------------------------------------
// complex -> real lifting

struct LiftedQuadratic {
  Eigen::MatrixXd quad;
  Eigen::VectorXd lin;
  double offset = 0.0;
};

/// Real matrix [[Re R, -Im R], [Im R, Re R]] of a Hermitian R, so that
/// w^H R w = [Re w; Im w]^T lift [Re w; Im w].
Eigen::MatrixXd lift_hermitian(const Eigen::MatrixXcd& r);

/// Expands (shift + u)^H R (shift + u) as a real quadratic in
/// v = [Re u; Im u]. Throws InvalidInput when R is not Hermitian.
LiftedQuadratic lift_complex_quadratic(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& shift);

/// Same expansion against an already lifted R.
LiftedQuadratic lift_complex_quadratic(const Eigen::MatrixXd& lifted_r,
                                       const Eigen::VectorXcd& shift);

Eigen::VectorXd stack_re_im(const Eigen::VectorXcd& z);
Eigen::VectorXcd unstack_re_im(const Eigen::VectorXd& v);

// ---------------------------------------------------------------------------
// bound-constrained QP

struct BoxQp {
  Eigen::MatrixXd quad;
  Eigen::VectorXd lin;
  /// Entries may be -inf / +inf.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct BoxQpOptions {
  double tol = 1e-8;
  int max_iter = 100000;
  /// APG iterations between active-set polish attempts.
  int polish_every = 50;
};

/// Holds a validated quadratic term so a stream of problems that share P
/// (one per symbol slot) pay for the eigen-analysis once.
class BoxQpSolver {
 public:
  /// Throws InvalidInput unless quad is symmetric (residual <= 1e-10
  /// relative) and PSD (smallest eigenvalue >= -1e-8 ||P||). Slightly
  /// negative eigenvalues are clipped to zero.
  explicit BoxQpSolver(const Eigen::MatrixXd& quad);

  const Eigen::MatrixXd& quad() const { return quad_; }
  double max_eigenvalue() const { return max_eig_; }
  Eigen::Index size() const { return quad_.rows(); }

  SolveReport solve(const Eigen::VectorXd& lin, const Eigen::VectorXd& lower,
                    const Eigen::VectorXd& upper, const BoxQpOptions& opts = {}) const;

 private:
  Eigen::MatrixXd quad_;
  double max_eig_ = 0.0;
};

SolveReport solve_box_qp(const BoxQp& p, double tol = 1e-8);
SolveReport solve_box_qp(const BoxQp& p, const BoxQpOptions& opts);

/// ||x - clip(x - grad f(x))||_inf, the fixed-point residual of projected
/// gradient with unit step.
double projected_gradient_residual(const Eigen::MatrixXd& quad, const Eigen::VectorXd& lin,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// linear-inequality QP

struct IneqQp {
  SparseMatrix quad;
  Eigen::VectorXd lin;
  SparseMatrix cons;
  Eigen::VectorXd rhs;
};

struct IneqQpOptions {
  double tol = 1e-8;      ///< KKT tolerance for Optimal
  double eps_abs = 1e-8;  ///< ADMM stopping, absolute
  double eps_rel = 1e-6;  ///< ADMM stopping, relative
  double rho = 1.0;
  double sigma = 1e-6;
  double relaxation = 1.6;
  int max_iter = 50000;
  int scaling_iters = 15;
  bool polish = true;
  /// Infeasibility guard: primal residual above this level...
  double stall_level = 1e-3;
  /// ...for this many consecutive iterations while duals grow.
  int stall_iters = 10000;
};

/// KKT residual of a candidate (x, y) for min f s.t. A x <= b: absolute
/// primal violation, normalized stationarity and complementarity.
double ineq_kkt_residual(const IneqQp& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

SolveReport solve_ineq_qp(const IneqQp& p, double tol = 1e-8);
SolveReport solve_ineq_qp(const IneqQp& p, const IneqQpOptions& opts);

// ---------------------------------------------------------------------------
// min-max of convex quadratics

struct QuadForm {
  SparseMatrix quad;
  Eigen::VectorXd lin;
  double offset = 0.0;

  double value(const Eigen::VectorXd& x) const;
};

struct MinMaxQp {
  std::vector<QuadForm> forms;
  /// May have zero rows.
  SparseMatrix cons;
  Eigen::VectorXd rhs;
  /// Optional starting point; infeasible starts are allowed.
  Eigen::VectorXd start;
};

struct MinMaxOptions {
  double tol = 1e-6;  ///< relative duality gap and KKT tolerance
  int max_iter = 200; ///< predictor-corrector iterations
};

SolveReport solve_minmax_qp(const MinMaxQp& p, double tol = 1e-6);
SolveReport solve_minmax_qp(const MinMaxQp& p, const MinMaxOptions& opts);

/// Throws InvalidInput unless P is symmetric and PSD to the tolerances of
/// BoxQpSolver. Works without an eigendecomposition for large sparse P.
void check_psd(const SparseMatrix& quad, const char* what);

}  // namespace slp

#endif  // SLP_QP_SOLVER_HPP
