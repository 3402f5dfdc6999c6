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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "envsep/constraint.hpp"
#include "support/oracles.hpp"

using namespace envsep;

namespace {

// basis column with all-pole envelope shape times a comb-like excitation
Eigen::VectorXd synthetic_basis(int num_bins, double radius, double theta,
                                int comb_period, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::VectorXd env = oracles::direct_envelope(
      oracles::resonator_coeffs(radius, theta), num_bins, 2 * (num_bins - 1));
  Eigen::VectorXd w(num_bins);
  for (int f = 0; f < num_bins; ++f) {
    const double comb = (f % comb_period == 0) ? 1.0 : 0.08;
    w(f) = env(f) * comb * (0.7 + 0.6 * oracles::uniform01(rng));
  }
  return w / w.sum();
}

Eigen::MatrixXd normalized_columns(int num_bins, int count,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd W(num_bins, count);
  for (int k = 0; k < count; ++k) {
    for (int f = 0; f < num_bins; ++f) W(f, k) = 0.02 + oracles::uniform01(rng);
    W.col(k) /= W.col(k).sum();
  }
  return W;
}

}  // namespace

TEST_CASE("alpha = 1 leaves the bases untouched") {
  const auto W = normalized_columns(129, 6, 1);
  const auto partition = nmf::Partition::contiguous(6, 2);
  std::vector<lpc::Envelope> targets(2);
  targets[0].values = Eigen::VectorXd::Constant(129, 1.0 / 129);
  targets[1].values = targets[0].values;
  const auto out = constraint::apply_informed(W, targets, partition, 1.0, 4);
  CHECK(out == W);
}

TEST_CASE("alpha = 0 with each column's own envelope is the identity") {
  const int num_bins = 257, count = 4;
  const auto W = normalized_columns(num_bins, count, 2);
  const auto partition = nmf::Partition::contiguous(count, count);
  std::vector<lpc::Envelope> targets;
  for (int k = 0; k < count; ++k)
    targets.push_back(lpc::split_basis(W.col(k), 4).envelope);
  const auto out = constraint::apply_informed(W, targets, partition, 0.0, 4);
  CHECK((out - W).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("alpha = 0 with a flat target composes split and remix") {
  const int num_bins = 257;
  Eigen::MatrixXd W(num_bins, 2);
  W.col(0) = synthetic_basis(num_bins, 0.9, 0.2 * std::numbers::pi, 10, 3);
  W.col(1) = synthetic_basis(num_bins, 0.8, 0.6 * std::numbers::pi, 14, 4);
  const auto partition = nmf::Partition::contiguous(2, 1);

  std::vector<lpc::Envelope> targets(1);
  targets[0].values = Eigen::VectorXd::Constant(num_bins, 1.0 / num_bins);
  const auto out = constraint::apply_informed(W, targets, partition, 0.0, 4);

  // hand-composed expectation from the public sub-operations
  for (int k = 0; k < 2; ++k) {
    const auto split = lpc::split_basis(W.col(k), 4);
    const Eigen::VectorXd expect =
        targets[0].values.cwiseProduct(split.excitation.values);
    CHECK((out.col(k) - expect.cwiseMax(nmf::kEpsilon)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("mixing pulls the re-extracted envelope toward the target") {
  const int num_bins = 257;
  const Eigen::VectorXd target_vec = oracles::direct_envelope(
      oracles::resonator_coeffs(0.92, 0.7 * std::numbers::pi), num_bins,
      2 * (num_bins - 1));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::VectorXd w =
        synthetic_basis(num_bins, 0.88, 0.15 * std::numbers::pi,
                        8 + static_cast<int>(seed % 5), 100 + seed);
    Eigen::MatrixXd W(num_bins, 1);
    W.col(0) = w;
    std::vector<lpc::Envelope> targets(1);
    targets[0].values = target_vec;
    const auto out = constraint::apply_informed(
        W, targets, nmf::Partition::contiguous(1, 1), 0.0, 4);

    const double before = oracles::cosine_similarity(
        lpc::split_basis(w, 4).envelope.values, target_vec);
    const double after = oracles::cosine_similarity(
        lpc::split_basis(out.col(0), 4).envelope.values, target_vec);
    CHECK(after >= before - 1e-6);
  }
}

TEST_CASE("informed constraint validates its inputs") {
  const auto W = normalized_columns(65, 4, 5);
  const auto partition = nmf::Partition::contiguous(4, 2);
  std::vector<lpc::Envelope> targets(2);
  targets[0].values = Eigen::VectorXd::Constant(64, 1.0 / 64);  // wrong length
  targets[1].values = Eigen::VectorXd::Constant(65, 1.0 / 65);
  CHECK_THROWS_AS(constraint::apply_informed(W, targets, partition, 0.5, 4),
                  std::invalid_argument);
  targets.pop_back();  // wrong count
  CHECK_THROWS_AS(constraint::apply_informed(W, targets, partition, 0.5, 4),
                  std::invalid_argument);
}

TEST_CASE("beta = 1 leaves the bases untouched") {
  const auto W = normalized_columns(129, 6, 6);
  const auto H = Eigen::MatrixXd::Ones(6, 11);
  const auto out =
      constraint::apply_blind(W, H, nmf::Partition::contiguous(6, 3), 1.0, 5.0, 4);
  CHECK(out == W);
}

TEST_CASE("a singleton group with beta = 0 is the identity") {
  const auto W = normalized_columns(257, 1, 7);
  const auto H = Eigen::MatrixXd::Ones(1, 9);
  const auto out =
      constraint::apply_blind(W, H, nmf::Partition::contiguous(1, 1), 0.0, 5.0, 4);
  CHECK((out - W).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("p = 0 averages group envelopes with equal weights") {
  const int num_bins = 129, count = 3;
  const auto W = normalized_columns(num_bins, count, 8);
  Eigen::MatrixXd H(count, 7);
  H.setRandom();
  H = H.cwiseAbs();

  const auto out = constraint::apply_blind(
      W, H, nmf::Partition::contiguous(count, 1), 0.0, 0.0, 4);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(num_bins);
  std::vector<lpc::BasisSplit> splits;
  for (int k = 0; k < count; ++k) {
    splits.push_back(lpc::split_basis(W.col(k), 4));
    mean += splits.back().envelope.values;
  }
  mean /= mean.sum();
  for (int k = 0; k < count; ++k) {
    const Eigen::VectorXd expect =
        mean.cwiseProduct(splits[static_cast<std::size_t>(k)].excitation.values);
    CHECK((out.col(k) - expect.cwiseMax(nmf::kEpsilon)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("p = 5 weights a 2:1 activation ratio as 32:1") {
  const int num_bins = 129;
  const auto W = normalized_columns(num_bins, 2, 9);
  Eigen::MatrixXd H(2, 4);
  H << 1.0, 1.0, 1.0, 1.0,  //
      0.5, 0.5, 0.5, 0.5;   // ||h_1|| = 2 ||h_2||

  const auto out = constraint::apply_blind(
      W, H, nmf::Partition::contiguous(2, 1), 0.0, 5.0, 4);

  const auto s0 = lpc::split_basis(W.col(0), 4);
  const auto s1 = lpc::split_basis(W.col(1), 4);
  Eigen::VectorXd mean = 32.0 * s0.envelope.values + 1.0 * s1.envelope.values;
  mean /= mean.sum();
  CHECK((out.col(0) - mean.cwiseProduct(s0.excitation.values).cwiseMax(nmf::kEpsilon))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((out.col(1) - mean.cwiseProduct(s1.excitation.values).cwiseMax(nmf::kEpsilon))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("every group member is remixed with the same mean envelope") {
  const int num_bins = 257, count = 6;
  const auto W = normalized_columns(num_bins, count, 10);
  Eigen::MatrixXd H = Eigen::MatrixXd::Ones(count, 5);
  H.row(2) *= 3.0;
  const auto partition = nmf::Partition::contiguous(count, 2);
  const auto out = constraint::apply_blind(W, H, partition, 0.0, 5.0, 4);

  for (const auto& group : partition.groups) {
    // implied envelope out_k ./ e_k is identical across the group
    Eigen::VectorXd first;
    for (int k : group) {
      const auto split = lpc::split_basis(W.col(k), 4);
      const Eigen::VectorXd implied =
          out.col(k).cwiseQuotient(split.excitation.values);
      if (first.size() == 0) {
        first = implied;
        CHECK(implied.minCoeff() > 0.0);
        CHECK(implied.sum() == doctest::Approx(1.0).epsilon(1e-9));
      } else {
        CHECK((implied - first).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }
}

TEST_CASE("an all-silent group falls back to uniform weights") {
  const auto W = normalized_columns(129, 4, 11);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(4, 6);
  H.row(2).setConstant(1.0);
  H.row(3).setConstant(1.0);  // group 2 active, group 1 silent
  constraint::ApplyStats stats;
  const auto out = constraint::apply_blind(
      W, H, nmf::Partition::contiguous(4, 2), 0.0, 5.0, 4, &stats);
  CHECK(stats.uniform_weight_groups == 1);
  CHECK(out.allFinite());

  // silent group equals the p = 0 equal-weight result
  const auto equal = constraint::apply_blind(
      W, H, nmf::Partition::contiguous(4, 2), 0.0, 0.0, 4);
  CHECK((out.col(0) - equal.col(0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((out.col(1) - equal.col(1)).cwiseAbs().maxCoeff() < 1e-12);
}
