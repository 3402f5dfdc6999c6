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

#ifndef ENVSEP_CONSTRAINT_HPP
#define ENVSEP_CONSTRAINT_HPP

#include <Eigen/Dense>
#include <vector>

#include "envsep/lpc.hpp"
#include "envsep/nmf.hpp"

namespace envsep::constraint {

/// Degenerate-case counters for one constraint application.
struct ApplyStats {
  int clamped_models = 0;         // Levinson clamp tripped while splitting
  int uniform_weight_groups = 0;  // blind group fell back to uniform weights
};

/// Informed constraint: each basis column k in group i is split into
/// envelope and excitation, and remixed toward the instrument's trained
/// envelope:
///   w_k <- alpha * w_k + (1 - alpha) * target_i .* e_k.
/// alpha == 1 is the identity. Columns are floored at nmf::kEpsilon but not
/// re-normalized; the next iteration's basis normalization restores unit L1.
Eigen::MatrixXd apply_informed(const Eigen::MatrixXd& W,
                               const std::vector<lpc::Envelope>& targets,
                               const nmf::Partition& partition, double alpha,
                               int lpc_order, ApplyStats* stats = nullptr);

/// Blind constraint: per group, basis envelopes are averaged with weights
/// nu_k = ||h_k||_1^p, the mean is L1-normalized, and every member is remixed
/// toward it:
///   w_k <- beta * w_k + (1 - beta) * mean_env .* e_k.
/// A group whose activations are all zero falls back to uniform weights.
/// beta == 1 is the identity.
Eigen::MatrixXd apply_blind(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                            const nmf::Partition& partition, double beta,
                            double weight_exponent, int lpc_order,
                            ApplyStats* stats = nullptr);

}  // namespace envsep::constraint

#endif  // ENVSEP_CONSTRAINT_HPP
