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
#include <string>
#include <vector>

#include "slp/errors.hpp"
#include "slp/precoders.hpp"

namespace slp {

namespace {

// Real variable layout: slot t owns [Re u_t; Im u_t] at offset 2Kt, the
// gains d sit at the tail (offset 2KT).
struct BlockLayout {
  Eigen::Index k;
  Eigen::Index slots;
  Eigen::Index u_re(Eigen::Index t, Eigen::Index i) const { return 2 * k * t + i; }
  Eigen::Index u_im(Eigen::Index t, Eigen::Index i) const { return 2 * k * t + k + i; }
  Eigen::Index gain(Eigen::Index i) const { return 2 * k * slots + i; }
  Eigen::Index size() const { return 2 * k * slots + k; }
};

void check_block(const ChannelState& ch, std::span<const QamSpec> specs, const SymbolBlock& block,
                 std::span<const GainConstants> constants) {
  const auto k = ch.users();
  if (static_cast<Eigen::Index>(specs.size()) != k || static_cast<Eigen::Index>(constants.size()) != k ||
      block.users() != k) {
    throw InvalidInput("block design: specs, constants and symbol block must cover all K users");
  }
  if (block.slots() < 1) throw InvalidInput("block design: block needs at least one slot");
}

// f_t(v) = z_t^T Rl z_t with z_t = [Re(D s_t + u_t); Im(D s_t + u_t)]
//        = (u_t block) + S_t d,  S_t = [Diag(Re s_t); Diag(Im s_t)].
// Emits scale * B_t^T Rl B_t as triplets, B_t = [I on u_t | S_t on d].
void add_slot_quadratic(const BlockLayout& lay, const Eigen::MatrixXd& lifted_r, std::span<const Symbol> s,
                        Eigen::Index t, double scale, std::vector<Eigen::Triplet<double>>& trip) {
  const Eigen::Index k = lay.k;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(2 * k + k));
  for (Eigen::Index i = 0; i < k; ++i) {
    idx[static_cast<std::size_t>(i)] = lay.u_re(t, i);
    idx[static_cast<std::size_t>(k + i)] = lay.u_im(t, i);
    idx[static_cast<std::size_t>(2 * k + i)] = lay.gain(i);
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * k, 3 * k);
  b.leftCols(2 * k).setIdentity();
  for (Eigen::Index i = 0; i < k; ++i) {
    b(i, 2 * k + i) = s[static_cast<std::size_t>(i)].re;
    b(k + i, 2 * k + i) = s[static_cast<std::size_t>(i)].im;
  }
  const Eigen::MatrixXd local = scale * (b.transpose() * lifted_r * b);
  for (Eigen::Index a = 0; a < 3 * k; ++a) {
    for (Eigen::Index c = 0; c < 3 * k; ++c) {
      if (local(a, c) != 0.0) trip.emplace_back(idx[a], idx[c], local(a, c));
    }
  }
}

// -d_i + a <= u <= d_i - c per axis, plus -d <= 0.
void block_constraints(const BlockLayout& lay, std::span<const QamSpec> specs, const SymbolBlock& block,
                       std::span<const GainConstants> constants, SparseMatrix& cons, Eigen::VectorXd& rhs) {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> b;
  auto add_row = [&](Eigen::Index u_col, double u_coef, Eigen::Index d_col, double bound) {
    const auto r = static_cast<Eigen::Index>(b.size());
    trip.emplace_back(r, u_col, u_coef);
    trip.emplace_back(r, d_col, -1.0);
    b.push_back(bound);
  };
  for (Eigen::Index t = 0; t < block.slots(); ++t) {
    const SepBounds sb = build_bounds(specs, block.slot(t), constants);
    for (Eigen::Index i = 0; i < lay.k; ++i) {
      const auto si = static_cast<std::size_t>(i);
      if (sb.a_re[si].is_finite()) add_row(lay.u_re(t, i), -1.0, lay.gain(i), -sb.a_re[si].value());
      if (sb.c_re[si].is_finite()) add_row(lay.u_re(t, i), 1.0, lay.gain(i), -sb.c_re[si].value());
      if (sb.a_im[si].is_finite()) add_row(lay.u_im(t, i), -1.0, lay.gain(i), -sb.a_im[si].value());
      if (sb.c_im[si].is_finite()) add_row(lay.u_im(t, i), 1.0, lay.gain(i), -sb.c_im[si].value());
    }
  }
  // Interior parts already force d_i >= alpha_i; the explicit row keeps d_i away
  // from zero for a user whose block holds only edge parts.
  for (Eigen::Index i = 0; i < lay.k; ++i) {
    trip.emplace_back(static_cast<Eigen::Index>(b.size()), lay.gain(i), -1.0);
    b.push_back(-constants[static_cast<std::size_t>(i)].alpha);
  }
  cons.resize(static_cast<Eigen::Index>(b.size()), lay.size());
  cons.setFromTriplets(trip.begin(), trip.end());
  rhs = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
}

BlockDesign assemble(const ChannelState& ch, const BlockLayout& lay, const SymbolBlock& block,
                     SolveReport report) {
  BlockDesign out;
  const Eigen::VectorXd& v = report.solution;
  out.gains = v.tail(lay.k);
  out.perturbations.resize(lay.k, lay.slots);
  out.signals.resize(ch.antennas(), lay.slots);
  out.avg_power = 0.0;
  out.peak_energy = 0.0;
  for (Eigen::Index t = 0; t < lay.slots; ++t) {
    for (Eigen::Index i = 0; i < lay.k; ++i) out.perturbations(i, t) = cdouble(v[lay.u_re(t, i)], v[lay.u_im(t, i)]);
    const Eigen::VectorXcd ds = out.gains.cast<cdouble>().cwiseProduct(symbol_vector(block.slot(t)));
    out.signals.col(t) = ch.pseudo_inverse() * (ds + out.perturbations.col(t));
    const double e = out.signals.col(t).squaredNorm();
    out.avg_power += e;
    out.peak_energy = std::max(out.peak_energy, e);
  }
  out.avg_power /= static_cast<double>(lay.slots);
  out.report = std::move(report);
  return out;
}

}  // namespace

BlockDesign block_average_design(const ChannelState& ch, std::span<const QamSpec> specs, const SymbolBlock& block,
                                 std::span<const GainConstants> constants, const IneqQpOptions& opts) {
  check_block(ch, specs, block, constants);
  const BlockLayout lay{ch.users(), block.slots()};
  const Eigen::MatrixXd& lifted_r = ch.lifted_gram().quad();

  std::vector<Eigen::Triplet<double>> trip;
  const double scale = 1.0 / static_cast<double>(block.slots());
  for (Eigen::Index t = 0; t < block.slots(); ++t) add_slot_quadratic(lay, lifted_r, block.slot(t), t, scale, trip);

  IneqQp qp;
  qp.quad.resize(lay.size(), lay.size());
  qp.quad.setFromTriplets(trip.begin(), trip.end());
  qp.lin = Eigen::VectorXd::Zero(lay.size());
  block_constraints(lay, specs, block, constants, qp.cons, qp.rhs);
  return assemble(ch, lay, block, solve_ineq_qp(qp, opts));
}

BlockDesign block_peak_design(const ChannelState& ch, std::span<const QamSpec> specs, const SymbolBlock& block,
                              std::span<const GainConstants> constants, const MinMaxOptions& opts) {
  check_block(ch, specs, block, constants);
  const BlockLayout lay{ch.users(), block.slots()};
  const Eigen::MatrixXd& lifted_r = ch.lifted_gram().quad();

  MinMaxQp qp;
  qp.forms.reserve(static_cast<std::size_t>(block.slots()));
  for (Eigen::Index t = 0; t < block.slots(); ++t) {
    std::vector<Eigen::Triplet<double>> trip;
    add_slot_quadratic(lay, lifted_r, block.slot(t), t, 1.0, trip);
    QuadForm f;
    f.quad.resize(lay.size(), lay.size());
    f.quad.setFromTriplets(trip.begin(), trip.end());
    f.lin = Eigen::VectorXd::Zero(lay.size());
    qp.forms.push_back(std::move(f));
  }
  block_constraints(lay, specs, block, constants, qp.cons, qp.rhs);

  // Warm start: the average-power design with every gain raised by delta,
  // which opens a margin of delta on every constraint row.
  const BlockDesign avg = block_average_design(ch, specs, block, constants, IneqQpOptions{});
  qp.start = avg.report.solution;
  for (Eigen::Index i = 0; i < lay.k; ++i) {
    qp.start[lay.gain(i)] += 1e-2 * constants[static_cast<std::size_t>(i)].alpha;
  }
  return assemble(ch, lay, block, solve_minmax_qp(qp, opts));
}

}  // namespace slp
