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

#ifndef SLP_CONSTELLATION_HPP
#define SLP_CONSTELLATION_HPP

#include <complex>
#include <cstdint>
#include <vector>

namespace slp {

using cdouble = std::complex<double>;

/// A square-QAM point with odd-integer coordinates, unnormalized.
struct Symbol {
  int re = 1;
  int im = 1;

  cdouble value() const { return {static_cast<double>(re), static_cast<double>(im)}; }
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Where a coordinate sits in the per-axis level set {±1, ±3, ..., ±(2L-1)}.
enum class PartClass { Interior, PosEdge, NegEdge };

/// Square QAM with 4L^2 points whose real and imaginary parts range over
/// {±1, ±3, ..., ±(2L-1)}. Unit spacing; any scaling is carried by the
/// receiver gain d_i, not by the constellation.
class QamSpec {
 public:
  explicit QamSpec(int level_count);

  int level_count() const { return level_count_; }
  int max_level() const { return 2 * level_count_ - 1; }
  int order() const { return 4 * level_count_ * level_count_; }
  /// Mean of |s|^2 over all points (10 for 16-QAM).
  double avg_energy() const;

  bool is_level(int part) const;
  bool contains(const Symbol& s) const { return is_level(s.re) && is_level(s.im); }

 private:
  int level_count_;
};

/// All points, ordered lexicographically by (re, im) ascending.
std::vector<Symbol> enumerate_points(const QamSpec& spec);

/// Nearest-point detection, done per axis. Ties at even integers go to the
/// lower-magnitude level; a coordinate of exactly zero maps to +1.
Symbol decide(const QamSpec& spec, cdouble z);

PartClass classify_part(const QamSpec& spec, int part);

/// `count` i.i.d. uniform draws; same seed gives the same sequence.
std::vector<Symbol> draw_symbols(const QamSpec& spec, std::uint64_t seed, std::size_t count);

}  // namespace slp

#endif  // SLP_CONSTELLATION_HPP
