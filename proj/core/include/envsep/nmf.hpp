// Copyright 2026 The envsep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ENVSEP_NMF_HPP
#define ENVSEP_NMF_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "envsep/config.hpp"

namespace envsep::nmf {

/// Floor applied to reconstructions and factor entries so multiplicative
/// updates never divide by zero or strand entries at exact zero.
inline constexpr double kEpsilon = 1e-12;

/// Disjoint, covering, nonempty index groups assigning basis columns to
/// instruments. Fixed before the iteration starts.
struct Partition {
  std::vector<std::vector<int>> groups;

  static Partition contiguous(int num_bases, int num_groups);

  int num_groups() const { return static_cast<int>(groups.size()); }
  int num_bases() const;
  /// Throws std::invalid_argument unless groups are disjoint, nonempty and
  /// cover exactly 0..num_bases-1.
  void validate(int num_bases) const;
};

/// F x K basis matrix with L1-normalized columns. normal mode draws
/// uniform(0,1) entries; sparse mode squares the same uniform draws, which
/// biases columns toward sparse shapes. Deterministic for a fixed seed.
Eigen::MatrixXd init_bases(int num_bins, int num_bases, InitMode mode,
                           std::uint64_t seed);

/// K x T activation matrix of uniform(0,1) entries (deterministic per seed).
Eigen::MatrixXd init_activations(int num_bases, int num_frames,
                                 std::uint64_t seed);

/// KL multiplicative update for activations:
///   H_kt <- H_kt * sum_f(W_fk X_ft / Xhat_ft) / sum_f W_fk
/// with Xhat = max(W H, eps). Result is floored at eps.
Eigen::MatrixXd update_activations(const Eigen::ArrayXXd& X,
                                   const Eigen::MatrixXd& W,
                                   const Eigen::MatrixXd& H);

/// Mirror update for bases, using the freshly updated activations:
///   W_fk <- W_fk * sum_t(H_kt X_ft / Xhat_ft) / sum_t H_kt
/// with Xhat = max(W H, eps). Result is floored at eps.
Eigen::MatrixXd update_bases(const Eigen::ArrayXXd& X,
                             const Eigen::MatrixXd& W,
                             const Eigen::MatrixXd& H);

/// Scale exchange: H rows absorb the column sums of W, W columns become
/// L1-normalized. The product W*H is preserved. A zero column sum resets the
/// column to flat 1/F, zeroes the activation row and is reported through
/// reset_columns when given.
void renormalize(Eigen::MatrixXd& W, Eigen::MatrixXd& H,
                 std::vector<int>* reset_columns = nullptr);

/// Generalized KL divergence sum(X log(X/Xhat) - X + Xhat), 0 log 0 == 0.
/// Xhat is floored at eps internally.
double kl_divergence(const Eigen::ArrayXXd& X, const Eigen::ArrayXXd& Xhat);

}  // namespace envsep::nmf

#endif  // ENVSEP_NMF_HPP
