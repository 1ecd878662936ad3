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

#include "slp/precoders.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "slp/errors.hpp"

namespace slp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dims(const ChannelState& ch, Eigen::Index gains, std::size_t symbols) {
  if (gains != ch.users() || static_cast<Eigen::Index>(symbols) != ch.users()) {
    throw InvalidInput("precoder: expected one gain and one symbol per user (K=" + std::to_string(ch.users()) +
                       ")");
  }
}

struct Interval {
  double lo;
  double hi;
};

// Residual interval [-d + a, d - c] for one axis.
Interval residual_interval(double d, const OffsetBound& a, const OffsetBound& c) {
  return {a.is_finite() ? -d + a.value() : -kInf, c.is_finite() ? d - c.value() : kInf};
}

// Per-axis residual boxes stacked as [re; im], checked for emptiness.
void residual_boxes(const SepBounds& bounds, const Eigen::VectorXd& d, Eigen::VectorXd& lower,
                    Eigen::VectorXd& upper) {
  const auto k = static_cast<Eigen::Index>(bounds.users());
  if (d.size() != k) throw InvalidInput("SEP bounds and gains disagree on the number of users");
  lower.resize(2 * k);
  upper.resize(2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Interval re = residual_interval(d[i], bounds.a_re[i], bounds.c_re[i]);
    const Interval im = residual_interval(d[i], bounds.a_im[i], bounds.c_im[i]);
    if (re.lo > re.hi || im.lo > im.hi) {
      throw InfeasibleGains("gain d_" + std::to_string(i) + " = " + std::to_string(d[i]) +
                            " is below the margin its symbol requires");
    }
    lower[i] = re.lo;
    upper[i] = re.hi;
    lower[k + i] = im.lo;
    upper[k + i] = im.hi;
  }
}

PrecodeOutput finish(const ChannelState& ch, const Eigen::VectorXd& d, std::span<const Symbol> s,
                     Eigen::VectorXcd x, Eigen::VectorXcd u) {
  PrecodeOutput out;
  const Eigen::VectorXcd ds = d.cast<cdouble>().cwiseProduct(symbol_vector(s));
  out.residual = ch.h_matrix() * x - ds;
  out.energy = x.squaredNorm();
  out.x = std::move(x);
  out.u = std::move(u);
  return out;
}

}  // namespace

Eigen::VectorXcd symbol_vector(std::span<const Symbol> s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) v[static_cast<Eigen::Index>(i)] = s[i].value();
  return v;
}

SymbolBlock::SymbolBlock(Eigen::Index users, Eigen::Index slots)
    : users_(users), slots_(slots), data_(static_cast<std::size_t>(users * slots)) {
  if (users < 0 || slots < 0) throw InvalidInput("SymbolBlock: negative dimension");
}

SymbolBlock SymbolBlock::draw(std::span<const QamSpec> specs, std::uint64_t seed, Eigen::Index slots) {
  const auto k = static_cast<Eigen::Index>(specs.size());
  SymbolBlock block(k, slots);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto stream = draw_symbols(specs[i], seed + static_cast<std::uint64_t>(i), static_cast<std::size_t>(slots));
    for (Eigen::Index t = 0; t < slots; ++t) block.at(i, t) = stream[static_cast<std::size_t>(t)];
  }
  return block;
}

PrecodeOutput zf_precode(const ChannelState& ch, const GainVector& gains, std::span<const Symbol> s) {
  check_dims(ch, gains.size(), s.size());
  const Eigen::VectorXcd ds = gains.values().cast<cdouble>().cwiseProduct(symbol_vector(s));
  return finish(ch, gains.values(), s, ch.pseudo_inverse() * ds, Eigen::VectorXcd::Zero(ch.users()));
}

PrecodeOutput slp_per_symbol(const ChannelState& ch, const SepBounds& bounds, const GainVector& gains,
                             std::span<const Symbol> s, const BoxQpOptions& opts) {
  check_dims(ch, gains.size(), s.size());
  Eigen::VectorXd lower, upper;
  residual_boxes(bounds, gains.values(), lower, upper);

  const Eigen::VectorXcd ds = gains.values().cast<cdouble>().cwiseProduct(symbol_vector(s));
  const BoxQpSolver& solver = ch.lifted_gram();
  const Eigen::VectorXd z0 = stack_re_im(ds);
  const Eigen::VectorXd lin = 2.0 * (solver.quad() * z0);
  SolveReport rep = solver.solve(lin, lower, upper, opts);
  rep.objective += z0.dot(solver.quad() * z0);

  Eigen::VectorXcd u = unstack_re_im(rep.solution);
  Eigen::VectorXcd x = ch.pseudo_inverse() * (ds + u);
  PrecodeOutput out = finish(ch, gains.values(), s, std::move(x), std::move(u));
  out.report = std::move(rep);
  return out;
}

PrecodeOutput slp_direct(const ChannelState& ch, const SepBounds& bounds, const GainVector& gains,
                         std::span<const Symbol> s, const IneqQpOptions& opts) {
  check_dims(ch, gains.size(), s.size());
  Eigen::VectorXd lower, upper;
  residual_boxes(bounds, gains.values(), lower, upper);

  const Eigen::Index k = ch.users();
  const Eigen::Index n = ch.antennas();
  const Eigen::MatrixXcd& h = ch.h_matrix();
  const Eigen::VectorXcd ds = gains.values().cast<cdouble>().cwiseProduct(symbol_vector(s));

  // Over xr = [Re x; Im x]:  Re(h_i^H x) = [Re h_i^H, -Im h_i^H] xr,
  //                          Im(h_i^H x) = [Im h_i^H,  Re h_i^H] xr.
  Eigen::MatrixXd rows(2 * k, 2 * n);
  rows.topLeftCorner(k, n) = h.real();
  rows.topRightCorner(k, n) = -h.imag();
  rows.bottomLeftCorner(k, n) = h.imag();
  rows.bottomRightCorner(k, n) = h.real();
  const Eigen::VectorXd target = stack_re_im(ds);

  std::vector<Eigen::Index> upper_rows, lower_rows;
  for (Eigen::Index r = 0; r < 2 * k; ++r) {
    if (std::isfinite(upper[r])) upper_rows.push_back(r);
    if (std::isfinite(lower[r])) lower_rows.push_back(r);
  }
  const auto m = static_cast<Eigen::Index>(upper_rows.size() + lower_rows.size());
  Eigen::MatrixXd a(m, 2 * n);
  Eigen::VectorXd b(m);
  Eigen::Index row = 0;
  for (Eigen::Index r : upper_rows) {
    a.row(row) = rows.row(r);
    b[row++] = target[r] + upper[r];
  }
  for (Eigen::Index r : lower_rows) {
    a.row(row) = -rows.row(r);
    b[row++] = -(target[r] + lower[r]);
  }

  IneqQp qp;
  qp.quad.resize(2 * n, 2 * n);
  qp.quad.setIdentity();
  qp.lin = Eigen::VectorXd::Zero(2 * n);
  qp.cons = a.sparseView();
  qp.rhs = b;
  SolveReport rep = solve_ineq_qp(qp, opts);

  Eigen::VectorXcd x = unstack_re_im(rep.solution);
  PrecodeOutput out = finish(ch, gains.values(), s, std::move(x), Eigen::VectorXcd());
  // x lies in the row space of H at the optimum, so its perturbation is the
  // residual itself.
  out.u = out.residual;
  out.report = std::move(rep);
  return out;
}

PrecodeOutput linear_bf_as_perturbed_zf(const ChannelState& ch, const BeamformerMatrix& w,
                                        const GainVector& gains, std::span<const Symbol> s) {
  check_dims(ch, gains.size(), s.size());
  if (w.w.rows() != ch.antennas() || w.w.cols() != ch.users()) {
    throw InvalidInput("linear_bf_as_perturbed_zf: beamformer must be N x K");
  }
  const Eigen::MatrixXcd off_row_space = w.w - ch.pseudo_inverse() * (ch.h_matrix() * w.w);
  if (off_row_space.norm() > 1e-8 * std::max(1.0, w.w.norm())) {
    throw PreconditionError("beamformer has a component outside the row space of H");
  }
  const Eigen::VectorXcd sv = symbol_vector(s);
  const Eigen::VectorXcd ds = gains.values().cast<cdouble>().cwiseProduct(sv);
  Eigen::VectorXcd u = ch.h_matrix() * (w.w * sv) - ds;
  Eigen::VectorXcd x = ch.pseudo_inverse() * (ds + u);
  return finish(ch, gains.values(), s, std::move(x), std::move(u));
}

GainVector heuristic_gains(std::span<const GainConstants> constants, double zeta) {
  if (!(zeta >= 1.0) || !std::isfinite(zeta)) {
    throw InvalidInput("heuristic gain scale zeta must be >= 1 (gains below alpha leave interior symbols "
                       "without a feasible residual)");
  }
  Eigen::VectorXd d(static_cast<Eigen::Index>(constants.size()));
  for (std::size_t i = 0; i < constants.size(); ++i) d[static_cast<Eigen::Index>(i)] = zeta * constants[i].alpha;
  return GainVector(std::move(d));
}

double bound_violation(const ChannelState& ch, const SepBounds& bounds, const Eigen::VectorXd& d,
                       std::span<const Symbol> s, const Eigen::VectorXcd& x) {
  const Eigen::VectorXcd b = ch.h_matrix() * x - d.cast<cdouble>().cwiseProduct(symbol_vector(s));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const Interval re = residual_interval(d[i], bounds.a_re[i], bounds.c_re[i]);
    const Interval im = residual_interval(d[i], bounds.a_im[i], bounds.c_im[i]);
    worst = std::max({worst, re.lo - b[i].real(), b[i].real() - re.hi, im.lo - b[i].imag(), b[i].imag() - im.hi});
  }
  return worst;
}

}  // namespace slp
