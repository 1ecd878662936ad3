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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "slp/errors.hpp"
#include "slp/qp_solver.hpp"

namespace slp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::MaxIter:
      return "MaxIter";
    case SolveStatus::Infeasible:
      return "Infeasible";
  }
  return "?";
}

namespace {

Eigen::VectorXd clip(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

double objective(const Eigen::MatrixXd& p, const Eigen::VectorXd& q, const Eigen::VectorXd& x) {
  return x.dot(p * x) + q.dot(x);
}

enum class Fix : unsigned char { Free, Lower, Upper };

// Solves the reduced stationarity system on the free coordinates, fixing
// the rest at their bounds, and repairs the working set until the point is
// feasible and every fixed coordinate has an outward gradient. Returns
// false if the reduced system is singular or the working set cycles.
bool active_set_polish(const Eigen::MatrixXd& p, const Eigen::VectorXd& q, const Eigen::VectorXd& lo,
                       const Eigen::VectorXd& hi, Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  std::vector<Fix> fix(static_cast<std::size_t>(n), Fix::Free);
  Eigen::VectorXd g = 2.0 * p * x + q;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lo[i] == hi[i]) {
      fix[i] = Fix::Lower;
    } else if (x[i] <= lo[i] && g[i] >= 0.0) {
      fix[i] = Fix::Lower;
    } else if (x[i] >= hi[i] && g[i] <= 0.0) {
      fix[i] = Fix::Upper;
    }
  }

  Eigen::VectorXd cand = x;
  for (Eigen::Index round = 0; round < 2 * n + 2; ++round) {
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (fix[i] == Fix::Lower) {
        cand[i] = lo[i];
      } else if (fix[i] == Fix::Upper) {
        cand[i] = hi[i];
      } else {
        free_idx.push_back(i);
      }
    }
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    if (nf > 0) {
      Eigen::MatrixXd pff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        double acc = -0.5 * q[free_idx[a]];
        for (Eigen::Index j = 0; j < n; ++j) {
          if (fix[j] != Fix::Free) acc -= p(free_idx[a], j) * cand[j];
        }
        rhs[a] = acc;
        for (Eigen::Index b = 0; b < nf; ++b) pff(a, b) = p(free_idx[a], free_idx[b]);
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(pff);
      if (ldlt.info() != Eigen::Success) return false;
      const Eigen::VectorXd zf = ldlt.solve(rhs);
      if (!zf.allFinite() || (pff * zf - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return false;
      for (Eigen::Index a = 0; a < nf; ++a) cand[free_idx[a]] = zf[a];
    }

    bool changed = false;
    for (Eigen::Index i : free_idx) {
      if (cand[i] < lo[i]) {
        fix[i] = Fix::Lower;
        changed = true;
      } else if (cand[i] > hi[i]) {
        fix[i] = Fix::Upper;
        changed = true;
      }
    }
    if (changed) continue;

    g = 2.0 * p * cand + q;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lo[i] == hi[i]) continue;
      if ((fix[i] == Fix::Lower && g[i] < 0.0) || (fix[i] == Fix::Upper && g[i] > 0.0)) {
        fix[i] = Fix::Free;
        changed = true;
      }
    }
    if (!changed) {
      x = cand;
      return true;
    }
  }
  return false;
}

}  // namespace

double projected_gradient_residual(const Eigen::MatrixXd& quad, const Eigen::VectorXd& lin,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = 2.0 * quad * x + lin;
  return (x - clip(x - g, lower, upper)).cwiseAbs().maxCoeff();
}

BoxQpSolver::BoxQpSolver(const Eigen::MatrixXd& quad) {
  if (quad.rows() != quad.cols()) throw InvalidInput("BoxQpSolver: quadratic term must be square");
  if (quad.size() == 0) return;
  if (!quad.allFinite()) throw InvalidInput("BoxQpSolver: quadratic term has non-finite entries");
  const double scale = std::max(1.0, quad.cwiseAbs().maxCoeff());
  if ((quad - quad.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidInput("BoxQpSolver: quadratic term is not symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (quad + quad.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw InvalidInput("BoxQpSolver: eigen-analysis failed");
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double norm = sym.norm();
  if (lam.minCoeff() < -1e-8 * norm) {
    throw InvalidInput("BoxQpSolver: quadratic term is not positive semidefinite");
  }
  if (lam.minCoeff() < 0.0) {
    quad_ = eig.eigenvectors() * lam.cwiseMax(0.0).asDiagonal() * eig.eigenvectors().transpose();
    quad_ = 0.5 * (quad_ + quad_.transpose()).eval();
  } else {
    quad_ = sym;
  }
  max_eig_ = std::max(0.0, lam.maxCoeff());
}

SolveReport BoxQpSolver::solve(const Eigen::VectorXd& lin, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper, const BoxQpOptions& opts) const {
  const Eigen::Index n = size();
  if (lin.size() != n || lower.size() != n || upper.size() != n) {
    throw InvalidInput("solve_box_qp: dimension mismatch");
  }
  SolveReport rep;
  if ((lower.array() > upper.array()).any() || lower.hasNaN() || upper.hasNaN()) {
    rep.status = SolveStatus::Infeasible;
    rep.solution = Eigen::VectorXd::Zero(n);
    rep.kkt_residual = std::numeric_limits<double>::infinity();
    rep.objective = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }

  const Eigen::MatrixXd& p = quad_;
  auto finish = [&](const Eigen::VectorXd& x, int iters, double res) {
    rep.solution = x;
    rep.objective = objective(p, lin, x);
    rep.kkt_residual = res;
    rep.iterations = iters;
    rep.status = res <= opts.tol ? SolveStatus::Optimal : SolveStatus::MaxIter;
    return rep;
  };

  Eigen::VectorXd x = clip(Eigen::VectorXd::Zero(n), lower, upper);
  double res = projected_gradient_residual(p, lin, lower, upper, x);
  if (res <= opts.tol) return finish(x, 0, res);

  const double lipschitz = max_eig_ > 0.0 ? 2.0 * max_eig_ : 1.0;
  const double step = 1.0 / lipschitz;
  Eigen::VectorXd y = x;
  Eigen::VectorXd best = x;
  double best_res = res;
  double fx = objective(p, lin, x);
  double t = 1.0;

  for (int k = 1; k <= opts.max_iter; ++k) {
    Eigen::VectorXd x_new = clip(y - step * (2.0 * p * y + lin), lower, upper);
    double f_new = objective(p, lin, x_new);
    if (f_new > fx) {
      // monotone restart: drop momentum, plain projected step from x
      t = 1.0;
      x_new = clip(x - step * (2.0 * p * x + lin), lower, upper);
      f_new = objective(p, lin, x_new);
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_new + ((t - 1.0) / t_new) * (x_new - x);
    x = x_new;
    fx = f_new;
    t = t_new;

    if (k % 10 == 0 || k == opts.max_iter) {
      res = projected_gradient_residual(p, lin, lower, upper, x);
      if (res < best_res) {
        best_res = res;
        best = x;
      }
      if (res <= opts.tol) return finish(x, k, res);
    }
    if (k % opts.polish_every == 0) {
      Eigen::VectorXd cand = x;
      if (active_set_polish(p, lin, lower, upper, cand)) {
        const double cres = projected_gradient_residual(p, lin, lower, upper, cand);
        if (cres <= opts.tol) return finish(cand, k, cres);
        if (cres < best_res) {
          best_res = cres;
          best = cand;
        }
      }
    }
  }
  return finish(best, opts.max_iter, best_res);
}

SolveReport solve_box_qp(const BoxQp& p, const BoxQpOptions& opts) {
  return BoxQpSolver(p.quad).solve(p.lin, p.lower, p.upper, opts);
}

SolveReport solve_box_qp(const BoxQp& p, double tol) {
  BoxQpOptions opts;
  opts.tol = tol;
  return solve_box_qp(p, opts);
}

}  // namespace slp
