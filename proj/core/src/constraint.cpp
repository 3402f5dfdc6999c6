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

#include "envsep/constraint.hpp"

#include <cmath>
#include <stdexcept>

namespace envsep::constraint {
namespace {

void check_inputs(const Eigen::MatrixXd& W, const nmf::Partition& partition,
                  double mix, int lpc_order) {
  partition.validate(static_cast<int>(W.cols()));
  if (mix < 0.0 || mix > 1.0)
    throw std::invalid_argument("constraint: mixing weight must be in [0, 1]");
  if (lpc_order < 1)
    throw std::invalid_argument("constraint: LPC order must be >= 1");
}

}  // namespace

Eigen::MatrixXd apply_informed(const Eigen::MatrixXd& W,
                               const std::vector<lpc::Envelope>& targets,
                               const nmf::Partition& partition, double alpha,
                               int lpc_order, ApplyStats* stats) {
  check_inputs(W, partition, alpha, lpc_order);
  if (targets.size() != partition.groups.size())
    throw std::invalid_argument("constraint: need one envelope per group");
  for (const auto& env : targets)
    if (env.values.size() != W.rows())
      throw std::invalid_argument("constraint: envelope length != bin count");
  if (alpha >= 1.0) return W;

  Eigen::MatrixXd out = W;
  for (std::size_t g = 0; g < partition.groups.size(); ++g) {
    const Eigen::VectorXd& target = targets[g].values;
    for (int k : partition.groups[g]) {
      const lpc::BasisSplit split = lpc::split_basis(W.col(k), lpc_order);
      if (stats && split.model.clamped) ++stats->clamped_models;
      out.col(k) = alpha * W.col(k) +
                   (1.0 - alpha) *
                       target.cwiseProduct(split.excitation.values);
    }
  }
  return out.cwiseMax(nmf::kEpsilon);
}

Eigen::MatrixXd apply_blind(const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                            const nmf::Partition& partition, double beta,
                            double weight_exponent, int lpc_order,
                            ApplyStats* stats) {
  check_inputs(W, partition, beta, lpc_order);
  if (H.rows() != W.cols())
    throw std::invalid_argument("constraint: H rows must match W columns");
  if (weight_exponent < 0.0)
    throw std::invalid_argument("constraint: weight exponent must be >= 0");
  if (beta >= 1.0) return W;

  Eigen::MatrixXd out = W;
  for (const auto& group : partition.groups) {
    std::vector<lpc::BasisSplit> splits;
    splits.reserve(group.size());
    Eigen::VectorXd norms(static_cast<Eigen::Index>(group.size()));
    for (std::size_t i = 0; i < group.size(); ++i) {
      splits.push_back(lpc::split_basis(W.col(group[i]), lpc_order));
      if (stats && splits.back().model.clamped) ++stats->clamped_models;
      norms(static_cast<Eigen::Index>(i)) =
          H.row(group[i]).cwiseAbs().sum();
    }

    // nu_k = ||h_k||^p, scaled by the group maximum so large exponents
    // cannot overflow. All-zero activations fall back to equal weights.
    const double max_norm = norms.maxCoeff();
    Eigen::VectorXd weights(norms.size());
    if (max_norm > 0.0) {
      for (Eigen::Index i = 0; i < norms.size(); ++i)
        weights(i) = std::pow(norms(i) / max_norm, weight_exponent);
    } else {
      weights.setOnes();
      if (stats) ++stats->uniform_weight_groups;
    }

    Eigen::VectorXd mean_env = Eigen::VectorXd::Zero(W.rows());
    for (std::size_t i = 0; i < group.size(); ++i)
      mean_env += weights(static_cast<Eigen::Index>(i)) *
                  splits[i].envelope.values;
    mean_env /= mean_env.sum();

    for (std::size_t i = 0; i < group.size(); ++i)
      out.col(group[i]) = beta * W.col(group[i]) +
                          (1.0 - beta) *
                              mean_env.cwiseProduct(splits[i].excitation.values);
  }
  return out.cwiseMax(nmf::kEpsilon);
}

}  // namespace envsep::constraint
