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

double QuadForm::value(const Eigen::VectorXd& x) const {
  return x.dot(quad * x) + lin.dot(x) + offset;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// c(z) = z_S^T Q z_S + q^T z_S + r on the support S of one epigraph row.
struct LocalQuad {
  std::vector<Eigen::Index> idx;
  Eigen::MatrixXd quad;
  Eigen::VectorXd lin;
  double offset = 0.0;

  Eigen::VectorXd gather(const Eigen::VectorXd& z) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) v[static_cast<Eigen::Index>(k)] = z[idx[k]];
    return v;
  }
  double value(const Eigen::VectorXd& zs) const { return zs.dot(quad * zs) + lin.dot(zs) + offset; }
  Eigen::VectorXd grad(const Eigen::VectorXd& zs) const { return 2.0 * quad * zs + lin; }
};

// f / scale - tau on the variables f touches, plus tau.
LocalQuad localize(const QuadForm& f, Eigen::Index tau_index, double scale) {
  const Eigen::Index n = f.quad.rows();
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < f.quad.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(f.quad, k); it; ++it) {
      if (it.value() != 0.0) {
        used[static_cast<std::size_t>(it.row())] = 1;
        used[static_cast<std::size_t>(it.col())] = 1;
      }
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (f.lin[j] != 0.0) used[static_cast<std::size_t>(j)] = 1;
  }
  LocalQuad lq;
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (used[static_cast<std::size_t>(j)]) {
      pos[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(lq.idx.size());
      lq.idx.push_back(j);
    }
  }
  const auto ns = static_cast<Eigen::Index>(lq.idx.size());
  lq.quad = Eigen::MatrixXd::Zero(ns + 1, ns + 1);
  lq.lin = Eigen::VectorXd::Zero(ns + 1);
  for (int k = 0; k < f.quad.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(f.quad, k); it; ++it) {
      const Eigen::Index r = pos[static_cast<std::size_t>(it.row())];
      const Eigen::Index c = pos[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) lq.quad(r, c) += it.value();
    }
  }
  lq.quad = ((0.5 / scale) * (lq.quad + lq.quad.transpose())).eval();
  for (Eigen::Index a = 0; a < ns; ++a) lq.lin[a] = f.lin[lq.idx[static_cast<std::size_t>(a)]] / scale;
  lq.idx.push_back(tau_index);
  lq.lin[ns] = -1.0;
  lq.offset = f.offset / scale;
  return lq;
}

// minimize c^T z  s.t.  quads(z) <= 0,  cons z <= rhs  (cons rows unit norm)
struct Epigraph {
  Eigen::Index dim = 0;
  Eigen::VectorXd cost;
  std::vector<LocalQuad> quads;
  SparseMatrix cons;
  Eigen::VectorXd rhs;
  double objective_floor = 1.0;

  Eigen::Index n_quads() const { return static_cast<Eigen::Index>(quads.size()); }
  Eigen::Index n_constraints() const { return n_quads() + cons.rows(); }
};

// Primal-dual point with explicit slacks: c(z) + s = 0, s > 0, lam > 0.
struct Iterate {
  Eigen::VectorXd z;
  Eigen::VectorXd s;    // quadratic rows first, then linear rows
  Eigen::VectorXd lam;  // same layout
};

struct Eval {
  Eigen::VectorXd cval;               // constraint values, same layout as s
  std::vector<Eigen::VectorXd> grads;  // local gradients of the quadratic rows
  Eigen::VectorXd dual;               // c + sum lam grad c
  double stat = kInf;                 // normalized stationarity
  double prim_q = kInf;               // quadratic row violation
  double prim_l = kInf;               // linear row violation
};

Eval evaluate(const Epigraph& ep, const Iterate& it) {
  Eval e;
  const Eigen::Index mq = ep.n_quads();
  e.cval.resize(ep.n_constraints());
  e.grads.resize(ep.quads.size());
  Eigen::VectorXd quad_part = Eigen::VectorXd::Zero(ep.dim);
  for (Eigen::Index k = 0; k < mq; ++k) {
    const LocalQuad& q = ep.quads[static_cast<std::size_t>(k)];
    const Eigen::VectorXd zs = q.gather(it.z);
    e.cval[k] = q.value(zs);
    e.grads[static_cast<std::size_t>(k)] = q.grad(zs);
    const Eigen::VectorXd& g = e.grads[static_cast<std::size_t>(k)];
    for (std::size_t a = 0; a < q.idx.size(); ++a) quad_part[q.idx[a]] += it.lam[k] * g[static_cast<Eigen::Index>(a)];
  }
  Eigen::VectorXd lin_part = Eigen::VectorXd::Zero(ep.dim);
  if (ep.cons.rows() > 0) {
    e.cval.tail(ep.cons.rows()) = ep.cons * it.z - ep.rhs;
    lin_part = ep.cons.transpose() * it.lam.tail(ep.cons.rows());
  }
  e.dual = ep.cost + quad_part + lin_part;
  e.stat = inf_norm(e.dual) / (1.0 + std::max({inf_norm(ep.cost), inf_norm(quad_part), inf_norm(lin_part)}));
  const double obj_scale = std::max(ep.objective_floor, std::abs(ep.cost.dot(it.z)));
  e.prim_q = mq > 0 ? std::max(0.0, e.cval.head(mq).maxCoeff()) / obj_scale : 0.0;
  e.prim_l = ep.cons.rows() > 0 ? std::max(0.0, e.cval.tail(ep.cons.rows()).maxCoeff()) / (1.0 + inf_norm(ep.rhs))
                                : 0.0;
  return e;
}

class NewtonSystem {
 public:
  // Assembles sum lam_k 2 Q_k + sum (lam_k / s_k) g_k g_k^T + A^T diag(lam / s) A.
  bool factor(const Epigraph& ep, const Iterate& it, const Eval& e) {
    std::vector<Eigen::Triplet<double>> trip;
    std::size_t reserve = 0;
    for (const auto& q : ep.quads) reserve += q.idx.size() * q.idx.size();
    trip.reserve(reserve);
    for (Eigen::Index k = 0; k < ep.n_quads(); ++k) {
      const LocalQuad& q = ep.quads[static_cast<std::size_t>(k)];
      const Eigen::VectorXd& g = e.grads[static_cast<std::size_t>(k)];
      const Eigen::MatrixXd h = (2.0 * it.lam[k]) * q.quad + (it.lam[k] / it.s[k]) * (g * g.transpose());
      for (std::size_t a = 0; a < q.idx.size(); ++a) {
        for (std::size_t b = 0; b < q.idx.size(); ++b) {
          trip.emplace_back(q.idx[a], q.idx[b], h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        }
      }
    }
    SparseMatrix m(ep.dim, ep.dim);
    m.setFromTriplets(trip.begin(), trip.end());
    if (ep.cons.rows() > 0) {
      const Eigen::Index ml = ep.cons.rows();
      const Eigen::VectorXd w = it.lam.tail(ml).cwiseQuotient(it.s.tail(ml));
      const SparseMatrix wa = w.asDiagonal() * ep.cons;
      m += SparseMatrix(ep.cons.transpose() * wa);
    }
    mat_ = m;
    const double diag_scale = std::max(1.0, mat_.diagonal().cwiseAbs().maxCoeff());
    SparseMatrix id(ep.dim, ep.dim);
    id.setIdentity();
    double reg = 1e-14 * diag_scale;
    if (!analyzed_) {
      ldlt_.analyzePattern(SparseMatrix(mat_ + reg * id));
      analyzed_ = true;
    }
    for (int attempt = 0; attempt < 8; ++attempt, reg *= 100.0) {
      ldlt_.factorize(SparseMatrix(mat_ + reg * id));
      if (ldlt_.info() == Eigen::Success && ldlt_.vectorD().minCoeff() > 0.0) return true;
    }
    return false;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = ldlt_.solve(rhs);
    for (int k = 0; k < 2; ++k) x += ldlt_.solve(rhs - mat_ * x);
    return x;
  }

 private:
  SparseMatrix mat_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  bool analyzed_ = false;
};

struct Direction {
  Eigen::VectorXd dz, ds, dlam;
};

// Newton direction for residuals (dual, c(z) + s, lam s - target).
Direction direction(const Epigraph& ep, const Iterate& it, const Eval& e, const NewtonSystem& ns,
                    const Eigen::VectorXd& rc) {
  const Eigen::Index mq = ep.n_quads();
  const Eigen::Index ml = ep.cons.rows();
  const Eigen::VectorXd rp = e.cval + it.s;
  // w = (lam rp - rc) / s enters the right-hand side through the row gradients
  const Eigen::VectorXd w = (it.lam.cwiseProduct(rp) - rc).cwiseQuotient(it.s);
  Eigen::VectorXd rhs = -e.dual;
  for (Eigen::Index k = 0; k < mq; ++k) {
    const LocalQuad& q = ep.quads[static_cast<std::size_t>(k)];
    const Eigen::VectorXd& g = e.grads[static_cast<std::size_t>(k)];
    for (std::size_t a = 0; a < q.idx.size(); ++a) rhs[q.idx[a]] -= g[static_cast<Eigen::Index>(a)] * w[k];
  }
  if (ml > 0) rhs -= ep.cons.transpose() * w.tail(ml);

  Direction d;
  d.dz = ns.solve(rhs);
  Eigen::VectorXd jdz(mq + ml);
  for (Eigen::Index k = 0; k < mq; ++k) {
    const LocalQuad& q = ep.quads[static_cast<std::size_t>(k)];
    jdz[k] = e.grads[static_cast<std::size_t>(k)].dot(q.gather(d.dz));
  }
  if (ml > 0) jdz.tail(ml) = ep.cons * d.dz;
  d.ds = -rp - jdz;
  d.dlam = (it.lam.cwiseProduct(jdz) + it.lam.cwiseProduct(rp) - rc).cwiseQuotient(it.s);
  return d;
}

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  }
  return a;
}

struct PdResult {
  Iterate it;
  int iterations = 0;
  bool converged = false;
  double kkt = kInf;
  double prim = kInf;
};

// Mehrotra predictor-corrector on the slack form of the epigraph problem.
PdResult interior_point(const Epigraph& ep, Iterate it, const MinMaxOptions& opts) {
  PdResult res;
  const auto m = static_cast<double>(ep.n_constraints());
  NewtonSystem ns;
  for (int k = 0; k <= opts.max_iter; ++k) {
    const Eval e = evaluate(ep, it);
    const double mu = it.lam.dot(it.s) / m;
    const double obj_scale = std::max(ep.objective_floor, std::abs(ep.cost.dot(it.z)));
    const double gap = m * mu / obj_scale;
    res.prim = std::max(e.prim_q, e.prim_l);
    res.kkt = std::max({e.stat, gap, res.prim});
    res.iterations = k;
    if (res.kkt <= opts.tol && e.prim_l <= std::min(opts.tol, 1e-9)) {
      res.converged = true;
      break;
    }
    if (k == opts.max_iter || !ns.factor(ep, it, e)) break;

    // predictor
    const Eigen::VectorXd rc_aff = it.lam.cwiseProduct(it.s);
    const Direction aff = direction(ep, it, e, ns, rc_aff);
    const double a_aff = std::min(max_step(it.s, aff.ds), max_step(it.lam, aff.dlam));
    const double mu_aff = (it.s + a_aff * aff.ds).dot(it.lam + a_aff * aff.dlam) / m;
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    // corrector
    const Eigen::VectorXd rc =
        rc_aff + aff.ds.cwiseProduct(aff.dlam) - Eigen::VectorXd::Constant(rc_aff.size(), sigma * mu);
    const Direction d = direction(ep, it, e, ns, rc);
    const double a = std::min(1.0, 0.99 * std::min(max_step(it.s, d.ds), max_step(it.lam, d.dlam)));
    Iterate next{it.z + a * d.dz, it.s + a * d.ds, it.lam + a * d.dlam};
    // Runaway multipliers with a stuck primal residual signal an empty feasible set.
    if (!next.z.allFinite() || !next.s.allFinite() || !next.lam.allFinite() || inf_norm(next.lam) > 1e12) break;
    it = std::move(next);
  }
  res.it = std::move(it);
  return res;
}

SolveReport infeasible_report(Eigen::Index n) {
  SolveReport rep;
  rep.status = SolveStatus::Infeasible;
  rep.solution = Eigen::VectorXd::Zero(n);
  rep.kkt_residual = kInf;
  rep.objective = std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace

SolveReport solve_minmax_qp(const MinMaxQp& p, double tol) {
  MinMaxOptions opts;
  opts.tol = tol;
  return solve_minmax_qp(p, opts);
}

SolveReport solve_minmax_qp(const MinMaxQp& p, const MinMaxOptions& opts) {
  if (p.forms.empty()) throw InvalidInput("solve_minmax_qp: at least one quadratic form is required");
  const Eigen::Index n = p.forms.front().quad.rows();
  for (const auto& f : p.forms) {
    if (f.quad.rows() != n || f.quad.cols() != n || f.lin.size() != n) {
      throw InvalidInput("solve_minmax_qp: dimension mismatch");
    }
    check_psd(f.quad, "solve_minmax_qp");
  }
  if (p.cons.rows() > 0 && (p.cons.cols() != n || p.cons.rows() != p.rhs.size())) {
    throw InvalidInput("solve_minmax_qp: constraint dimension mismatch");
  }

  // Unit-norm rows; rows with rhs = +inf never bind.
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> b;
  if (p.cons.rows() > 0) {
    const SparseMatrix rows = p.cons.transpose();
    for (Eigen::Index i = 0; i < p.rhs.size(); ++i) {
      if (p.rhs[i] == -kInf || std::isnan(p.rhs[i])) return infeasible_report(n);
      if (p.rhs[i] == kInf) continue;
      double norm = 0.0;
      for (SparseMatrix::InnerIterator it(rows, i); it; ++it) norm += it.value() * it.value();
      norm = std::sqrt(norm);
      if (norm == 0.0) {
        if (p.rhs[i] < 0.0) return infeasible_report(n);
        continue;
      }
      const auto r = static_cast<Eigen::Index>(b.size());
      for (SparseMatrix::InnerIterator it(rows, i); it; ++it) trip.emplace_back(r, it.row(), it.value() / norm);
      b.push_back(p.rhs[i] / norm);
    }
  }

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  if (p.start.size() == n && p.start.allFinite()) x0 = p.start;
  double fmax = -kInf;
  for (const auto& f : p.forms) fmax = std::max(fmax, f.value(x0));
  const double scale = std::max(1.0, std::abs(fmax));

  // Epigraph in units of the starting peak: minimize tau  s.t.
  // f_t(x) / scale - tau <= 0,  A x <= b.
  Epigraph ep;
  ep.dim = n + 1;
  ep.cost = Eigen::VectorXd::Zero(n + 1);
  ep.cost[n] = 1.0;
  ep.objective_floor = 1.0 / scale;
  for (const auto& f : p.forms) ep.quads.push_back(localize(f, n, scale));
  const auto ml = static_cast<Eigen::Index>(b.size());
  ep.cons.resize(ml, n + 1);
  ep.cons.setFromTriplets(trip.begin(), trip.end());
  ep.rhs = Eigen::Map<Eigen::VectorXd>(b.data(), ml);

  Iterate it;
  it.z.resize(n + 1);
  it.z << x0, fmax / scale + 0.1;
  const Eigen::Index m = ep.n_constraints();
  it.lam = Eigen::VectorXd::Zero(m);
  const Eval e0 = evaluate(ep, it);
  // Exact slacks where the start is strictly feasible, so feasible rows stay
  // feasible; a floor elsewhere.
  it.s = (-e0.cval).cwiseMax(1e-2);
  const double mu0 = std::max(ep.objective_floor, std::abs(ep.cost.dot(it.z))) / static_cast<double>(m);
  it.lam = (mu0 * it.s.cwiseInverse()).cwiseMax(1e-8);

  const PdResult r = interior_point(ep, std::move(it), opts);

  SolveReport rep;
  rep.solution = r.it.z.head(n);
  rep.iterations = r.iterations;
  rep.objective = -kInf;
  for (const auto& f : p.forms) rep.objective = std::max(rep.objective, f.value(rep.solution));
  rep.kkt_residual = r.kkt;
  rep.duals = r.it.lam;
  if (r.converged) {
    rep.status = SolveStatus::Optimal;
  } else if (r.prim > 1e-3) {
    rep.status = SolveStatus::Infeasible;
  } else {
    rep.status = SolveStatus::MaxIter;
  }
  return rep;
}

}  // namespace slp
