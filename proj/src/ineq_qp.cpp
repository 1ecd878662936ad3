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

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "slp/errors.hpp"
#include "slp/qp_solver.hpp"

namespace slp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Row-wise max magnitude of a column-major sparse matrix.
Eigen::VectorXd row_inf_norms(const SparseMatrix& a) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      out[it.row()] = std::max(out[it.row()], std::abs(it.value()));
    }
  }
  return out;
}

Eigen::VectorXd col_inf_norms(const SparseMatrix& a) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.cols());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      out[it.col()] = std::max(out[it.col()], std::abs(it.value()));
    }
  }
  return out;
}

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

// Problem after dropping +inf rows and applying Ruiz equilibration:
//   x = D xs,  constraint rows scaled by E,  cost scaled by c.
struct ScaledProblem {
  SparseMatrix quad;
  Eigen::VectorXd lin;
  SparseMatrix cons;
  Eigen::VectorXd rhs;
  Eigen::VectorXd d;
  Eigen::VectorXd e;
  double c = 1.0;
};

ScaledProblem equilibrate(const SparseMatrix& quad, const Eigen::VectorXd& lin, const SparseMatrix& cons,
                          const Eigen::VectorXd& rhs, int iters) {
  ScaledProblem s{quad, lin, cons, rhs, Eigen::VectorXd::Ones(quad.rows()),
                  Eigen::VectorXd::Ones(cons.rows()), 1.0};
  auto inv_sqrt = [](double v) { return v < 1e-4 ? 1.0 : (v > 1e4 ? 1e-2 : 1.0 / std::sqrt(v)); };
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd pc = col_inf_norms(s.quad);
    const Eigen::VectorXd ac = col_inf_norms(s.cons);
    const Eigen::VectorXd ar = row_inf_norms(s.cons);
    Eigen::VectorXd dd(pc.size());
    for (Eigen::Index j = 0; j < pc.size(); ++j) dd[j] = inv_sqrt(std::max(pc[j], ac[j]));
    Eigen::VectorXd de(ar.size());
    for (Eigen::Index i = 0; i < ar.size(); ++i) de[i] = inv_sqrt(ar[i]);
    s.quad = dd.asDiagonal() * s.quad * dd.asDiagonal();
    s.cons = de.asDiagonal() * s.cons * dd.asDiagonal();
    s.d = s.d.cwiseProduct(dd);
    s.e = s.e.cwiseProduct(de);
  }
  s.lin = s.d.cwiseProduct(lin);
  s.rhs = s.e.cwiseProduct(rhs);
  const Eigen::VectorXd pc = col_inf_norms(s.quad);
  const double mean_col = pc.size() ? pc.mean() : 0.0;
  double cost = std::max(mean_col, inf_norm(s.lin));
  cost = cost < 1e-4 ? 1.0 : 1.0 / cost;
  s.c = std::clamp(cost, 1e-4, 1e4);
  s.quad *= s.c;
  s.lin *= s.c;
  return s;
}

// Equality-constrained solve on a guessed active set, repaired by
// primal-dual active-set exchanges. Works in the scaled space.
bool polish(const ScaledProblem& s, const Eigen::VectorXd& z, const Eigen::VectorXd& y,
            Eigen::VectorXd& x_out, Eigen::VectorXd& y_out) {
  const Eigen::Index n = s.quad.rows();
  const Eigen::Index m = s.cons.rows();
  std::vector<char> active(static_cast<std::size_t>(m), 0);
  for (Eigen::Index i = 0; i < m; ++i) active[i] = (s.rhs[i] - z[i] < y[i]) ? 1 : 0;

  const SparseMatrix cons_rows = s.cons.transpose();  // column i = row i of A
  const double delta = 1e-9;
  for (int round = 0; round < 30; ++round) {
    std::vector<Eigen::Index> act;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (active[i]) act.push_back(i);
    }
    const auto na = static_cast<Eigen::Index>(act.size());
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<Eigen::Triplet<double>> trip0;
    for (int k = 0; k < s.quad.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(s.quad, k); it; ++it) {
        if (it.row() >= it.col()) continue;
        trip.emplace_back(it.row(), it.col(), 2.0 * it.value());
      }
    }
    for (Eigen::Index a = 0; a < na; ++a) {
      for (SparseMatrix::InnerIterator it(cons_rows, act[a]); it; ++it) {
        trip.emplace_back(it.row(), n + a, it.value());
      }
    }
    trip0 = trip;
    Eigen::VectorXd pdiag = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < s.quad.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(s.quad, k); it; ++it) {
        if (it.row() == it.col()) pdiag[it.row()] += 2.0 * it.value();
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      trip.emplace_back(j, j, pdiag[j] + delta);
      trip0.emplace_back(j, j, pdiag[j]);
    }
    for (Eigen::Index a = 0; a < na; ++a) {
      trip.emplace_back(n + a, n + a, -delta);
      trip0.emplace_back(n + a, n + a, 0.0);
    }
    SparseMatrix kkt(n + na, n + na);
    SparseMatrix kkt0(n + na, n + na);
    kkt.setFromTriplets(trip.begin(), trip.end());
    kkt0.setFromTriplets(trip0.begin(), trip0.end());
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Upper> ldlt(kkt);
    if (ldlt.info() != Eigen::Success) return false;

    Eigen::VectorXd rhs(n + na);
    rhs.head(n) = -s.lin;
    for (Eigen::Index a = 0; a < na; ++a) rhs[n + a] = s.rhs[act[a]];
    Eigen::VectorXd sol = ldlt.solve(rhs);
    const SparseMatrix kkt0_full = kkt0.selfadjointView<Eigen::Upper>();
    for (int r = 0; r < 5; ++r) {
      const Eigen::VectorXd resid = rhs - kkt0_full * sol;
      sol += ldlt.solve(resid);
    }
    if (!sol.allFinite()) return false;

    Eigen::VectorXd x = sol.head(n);
    Eigen::VectorXd yy = Eigen::VectorXd::Zero(m);
    for (Eigen::Index a = 0; a < na; ++a) yy[act[a]] = sol[n + a];

    const Eigen::VectorXd ax = s.cons * x;
    bool changed = false;
    const double slack_tol = 1e-12 * (1.0 + inf_norm(s.rhs));
    for (Eigen::Index i = 0; i < m; ++i) {
      if (active[i] && yy[i] < 0.0) {
        active[i] = 0;
        changed = true;
      } else if (!active[i] && ax[i] > s.rhs[i] + slack_tol) {
        active[i] = 1;
        changed = true;
      }
    }
    if (!changed) {
      x_out = x;
      y_out = yy;
      return true;
    }
  }
  return false;
}

}  // namespace

void check_psd(const SparseMatrix& quad, const char* what) {
  if (quad.rows() != quad.cols()) throw InvalidInput(std::string(what) + ": quadratic term must be square");
  if (quad.rows() == 0) return;
  const SparseMatrix diff = quad - SparseMatrix(quad.transpose());
  double maxabs = 0.0;
  double fro = 0.0;
  for (int k = 0; k < quad.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(quad, k); it; ++it) {
      if (!std::isfinite(it.value())) throw InvalidInput(std::string(what) + ": non-finite quadratic term");
      maxabs = std::max(maxabs, std::abs(it.value()));
      fro += it.value() * it.value();
    }
  }
  double asym = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) asym = std::max(asym, std::abs(it.value()));
  }
  if (asym > 1e-10 * std::max(1.0, maxabs)) {
    throw InvalidInput(std::string(what) + ": quadratic term is not symmetric");
  }
  if (fro == 0.0) return;
  // lambda_min(P) >= -1e-8 ||P||  <=>  P + 1e-8 ||P|| I is positive definite.
  const SparseMatrix shifted = quad + (1e-8 * std::sqrt(fro)) * sparse_identity(quad.rows());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
    throw InvalidInput(std::string(what) + ": quadratic term is not positive semidefinite");
  }
}

double ineq_kkt_residual(const IneqQp& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd px2 = 2.0 * (p.quad * x);
  const Eigen::VectorXd aty = p.cons.transpose() * y;
  const Eigen::VectorXd stat = px2 + p.lin + aty;
  const double stat_res =
      inf_norm(stat) / (1.0 + std::max({inf_norm(px2), inf_norm(p.lin), inf_norm(aty)}));

  double primal = 0.0;
  double compl_res = 0.0;
  double dual_sign = 0.0;
  double scale_ax = 0.0;
  const Eigen::VectorXd ax = p.cons * x;
  for (Eigen::Index i = 0; i < ax.size(); ++i) {
    if (std::isinf(p.rhs[i]) && p.rhs[i] > 0) continue;
    scale_ax = std::max({scale_ax, std::abs(ax[i]), std::abs(p.rhs[i])});
  }
  const double ynorm = inf_norm(y);
  for (Eigen::Index i = 0; i < ax.size(); ++i) {
    if (std::isinf(p.rhs[i]) && p.rhs[i] > 0) {
      compl_res = std::max(compl_res, std::abs(y[i]));
      continue;
    }
    const double slack = p.rhs[i] - ax[i];
    primal = std::max(primal, -slack);
    compl_res = std::max(compl_res, std::abs(y[i] * slack));
    dual_sign = std::max(dual_sign, -y[i]);
  }
  compl_res /= 1.0 + ynorm * scale_ax;
  dual_sign /= 1.0 + ynorm;
  return std::max({stat_res, primal, compl_res, dual_sign});
}

SolveReport solve_ineq_qp(const IneqQp& p, double tol) {
  IneqQpOptions opts;
  opts.tol = tol;
  opts.eps_abs = std::min(opts.eps_abs, tol);
  return solve_ineq_qp(p, opts);
}

SolveReport solve_ineq_qp(const IneqQp& p, const IneqQpOptions& opts) {
  const Eigen::Index n = p.quad.rows();
  if (p.lin.size() != n || p.cons.cols() != n || p.cons.rows() != p.rhs.size()) {
    throw InvalidInput("solve_ineq_qp: dimension mismatch");
  }
  check_psd(p.quad, "solve_ineq_qp");

  SolveReport rep;
  rep.duals = Eigen::VectorXd::Zero(p.cons.rows());

  // Rows with rhs = +inf never bind; rhs = -inf can never hold.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < p.rhs.size(); ++i) {
    if (std::isnan(p.rhs[i])) throw InvalidInput("solve_ineq_qp: NaN right-hand side");
    if (p.rhs[i] == -kInf) {
      rep.status = SolveStatus::Infeasible;
      rep.solution = Eigen::VectorXd::Zero(n);
      rep.kkt_residual = kInf;
      return rep;
    }
    if (p.rhs[i] < kInf) keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  SparseMatrix cons(m, n);
  Eigen::VectorXd rhs(m);
  {
    SparseMatrix sel(m, p.cons.rows());
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index r = 0; r < m; ++r) {
      t.emplace_back(r, keep[r], 1.0);
      rhs[r] = p.rhs[keep[r]];
    }
    sel.setFromTriplets(t.begin(), t.end());
    cons = sel * p.cons;
  }
  const SparseMatrix quad_sym = 0.5 * (p.quad + SparseMatrix(p.quad.transpose()));

  const ScaledProblem s = equilibrate(quad_sym, p.lin, cons, rhs, opts.scaling_iters);
  const double rho = opts.rho;
  const double sigma = opts.sigma;
  const double alpha = opts.relaxation;

  const SparseMatrix kmat =
      2.0 * s.quad + sigma * sparse_identity(n) + rho * SparseMatrix(s.cons.transpose() * s.cons);
  Eigen::SimplicialLDLT<SparseMatrix> factor(kmat);
  if (factor.info() != Eigen::Success) throw SolverFailure("solve_ineq_qp: factorization failed");

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m).cwiseMin(s.rhs);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y_prev = y;

  const Eigen::VectorXd d_inv = s.d.cwiseInverse();
  const Eigen::VectorXd e_inv = s.e.cwiseInverse();

  auto unscaled = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
    Eigen::VectorXd xu = s.d.cwiseProduct(xs);
    Eigen::VectorXd yk = s.e.cwiseProduct(ys) / s.c;
    Eigen::VectorXd yu = Eigen::VectorXd::Zero(p.cons.rows());
    for (Eigen::Index r = 0; r < m; ++r) yu[keep[r]] = yk[r];
    return std::make_pair(xu, yu);
  };
  auto finish = [&](const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, int iters) {
    auto [xu, yu] = unscaled(xs, ys);
    rep.solution = xu;
    rep.duals = yu;
    rep.objective = xu.dot(p.quad * xu) + p.lin.dot(xu);
    rep.kkt_residual = ineq_kkt_residual(p, xu, yu.cwiseMax(0.0));
    rep.iterations = iters;
    rep.status = rep.kkt_residual <= opts.tol ? SolveStatus::Optimal : SolveStatus::MaxIter;
    return rep;
  };
  auto try_polish = [&](int iters) -> bool {
    if (!opts.polish) return false;
    Eigen::VectorXd xp, yp;
    if (!polish(s, z, y, xp, yp)) return false;
    auto [xu, yu] = unscaled(xp, yp);
    if (ineq_kkt_residual(p, xu, yu) > opts.tol) return false;
    finish(xp, yp, iters);
    return true;
  };

  int next_polish = 25;
  int stall_count = 0;
  double prev_ynorm = 0.0;
  for (int k = 1; k <= opts.max_iter; ++k) {
    const Eigen::VectorXd rhs_k = sigma * x - s.lin + s.cons.transpose() * (rho * z - y);
    const Eigen::VectorXd xt = factor.solve(rhs_k);
    const Eigen::VectorXd zt = s.cons * xt;
    x = alpha * xt + (1.0 - alpha) * x;
    const Eigen::VectorXd zr = alpha * zt + (1.0 - alpha) * z;
    const Eigen::VectorXd z_new = (zr + y / rho).cwiseMin(s.rhs);
    y_prev = y;
    y = y + rho * (zr - z_new);
    z = z_new;

    if (k % 10 != 0 && k != opts.max_iter) continue;

    const Eigen::VectorXd ax = s.cons * x;
    const double r_prim = inf_norm(e_inv.cwiseProduct(ax - z));
    const double eps_prim = opts.eps_abs + opts.eps_rel * std::max(inf_norm(e_inv.cwiseProduct(ax)),
                                                                   inf_norm(e_inv.cwiseProduct(z)));
    const Eigen::VectorXd px2 = 2.0 * (s.quad * x);
    const Eigen::VectorXd aty = s.cons.transpose() * y;
    const double r_dual = inf_norm(d_inv.cwiseProduct(px2 + s.lin + aty)) / s.c;
    const double eps_dual =
        opts.eps_abs + opts.eps_rel *
                           std::max({inf_norm(d_inv.cwiseProduct(px2)), inf_norm(d_inv.cwiseProduct(aty)),
                                     inf_norm(d_inv.cwiseProduct(s.lin))}) /
                           s.c;

    if (r_prim <= eps_prim && r_dual <= eps_dual) {
      if (try_polish(k)) return rep;
      auto [xu, yu] = unscaled(x, y);
      if (ineq_kkt_residual(p, xu, yu.cwiseMax(0.0)) <= opts.tol) return finish(x, y, k);
    } else if (k >= next_polish) {
      next_polish *= 2;
      if (try_polish(k)) return rep;
    }

    // Primal infeasibility certificate: dy >= 0, A^T dy ~ 0, b^T dy < 0.
    const Eigen::VectorXd dy = s.e.cwiseProduct(y - y_prev);
    const double dy_norm = inf_norm(dy);
    if (m > 0 && dy_norm > 1e-12 && dy.minCoeff() >= -1e-9 * dy_norm) {
      const Eigen::VectorXd atdy = cons.transpose() * dy;
      const double btdy = rhs.dot(dy);
      if (inf_norm(atdy) <= 1e-6 * dy_norm && btdy < -1e-6 * dy_norm) {
        rep.status = SolveStatus::Infeasible;
        rep.solution = s.d.cwiseProduct(x);
        rep.iterations = k;
        rep.kkt_residual = kInf;
        rep.objective = std::numeric_limits<double>::quiet_NaN();
        return rep;
      }
    }
    // Stagnation guard.
    const double ynorm = inf_norm(y);
    if (r_prim > opts.stall_level && ynorm > prev_ynorm) {
      stall_count += 10;
    } else {
      stall_count = 0;
    }
    prev_ynorm = ynorm;
    if (stall_count >= opts.stall_iters) {
      rep.status = SolveStatus::Infeasible;
      rep.solution = s.d.cwiseProduct(x);
      rep.iterations = k;
      rep.kkt_residual = kInf;
      rep.objective = std::numeric_limits<double>::quiet_NaN();
      return rep;
    }
  }
  if (try_polish(opts.max_iter)) return rep;
  return finish(x, y, opts.max_iter);
}

}  // namespace slp
