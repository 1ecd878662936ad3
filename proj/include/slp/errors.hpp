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

#ifndef SLP_ERRORS_HPP
#define SLP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace slp {

/// Malformed argument: out-of-set symbol, non-finite sample, bad dimensions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Probability outside the open interval a tail inverse accepts. Raised for
/// SEP requirements that cannot be met (eps = 0) or are vacuous (eps = 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Channel matrix is rank deficient or has more users than antennas.
class ChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signal gains too small for the SEP bound intervals to be nonempty.
class InfeasibleGains : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an identity does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A convex solver returned a non-optimal status where one was required.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slp

#endif  // SLP_ERRORS_HPP
