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

#include "envsep/nmf.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace envsep::nmf {
namespace {

// Fill order is column-major, so factorizations are reproducible bit for bit
// across platforms for a fixed seed.
Eigen::MatrixXd uniform_matrix(int rows, int cols, std::uint64_t seed,
                               bool squared) {
  detail::UniformSource rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int k = 0; k < cols; ++k)
    for (int f = 0; f < rows; ++f) {
      const double u = rng.next();
      m(f, k) = squared ? u * u : u;
    }
  return m;
}

void check_shapes(const Eigen::ArrayXXd& X, const Eigen::MatrixXd& W,
                  const Eigen::MatrixXd& H) {
  if (W.rows() != X.rows() || H.cols() != X.cols() || W.cols() != H.rows())
    throw std::invalid_argument("nmf: non-conformable shapes");
}

}  // namespace

Partition Partition::contiguous(int num_bases, int num_groups) {
  if (num_groups <= 0 || num_bases < num_groups)
    throw std::invalid_argument("partition: need 1 <= groups <= bases");
  Partition p;
  p.groups.resize(static_cast<std::size_t>(num_groups));
  const int base = num_bases / num_groups;
  const int extra = num_bases % num_groups;
  int next = 0;
  for (int g = 0; g < num_groups; ++g) {
    const int size = base + (g < extra ? 1 : 0);
    for (int i = 0; i < size; ++i) p.groups[static_cast<std::size_t>(g)].push_back(next++);
  }
  return p;
}

int Partition::num_bases() const {
  int n = 0;
  for (const auto& g : groups) n += static_cast<int>(g.size());
  return n;
}

void Partition::validate(int num_bases) const {
  std::vector<char> seen(static_cast<std::size_t>(num_bases), 0);
  if (groups.empty()) throw std::invalid_argument("partition: no groups");
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("partition: empty group");
    for (int k : g) {
      if (k < 0 || k >= num_bases)
        throw std::invalid_argument("partition: index out of range");
      if (seen[static_cast<std::size_t>(k)]++)
        throw std::invalid_argument("partition: duplicate index");
    }
  }
  for (char s : seen)
    if (!s) throw std::invalid_argument("partition: uncovered basis index");
}

Eigen::MatrixXd init_bases(int num_bins, int num_bases, InitMode mode,
                           std::uint64_t seed) {
  if (num_bins <= 0 || num_bases <= 0)
    throw std::invalid_argument("nmf: matrix dimensions must be positive");
  Eigen::MatrixXd W = uniform_matrix(num_bins, num_bases, seed,
                                     mode == InitMode::sparse);
  W = W.cwiseMax(kEpsilon);
  for (int k = 0; k < num_bases; ++k) W.col(k) /= W.col(k).sum();
  return W;
}

Eigen::MatrixXd init_activations(int num_bases, int num_frames,
                                 std::uint64_t seed) {
  if (num_bases <= 0 || num_frames <= 0)
    throw std::invalid_argument("nmf: matrix dimensions must be positive");
  return uniform_matrix(num_bases, num_frames, seed, false)
      .cwiseMax(kEpsilon);
}

Eigen::MatrixXd update_activations(const Eigen::ArrayXXd& X,
                                   const Eigen::MatrixXd& W,
                                   const Eigen::MatrixXd& H) {
  check_shapes(X, W, H);
  const Eigen::ArrayXXd model = (W * H).array().max(kEpsilon);
  const Eigen::MatrixXd ratio = (X / model).matrix();
  const Eigen::MatrixXd numer = W.transpose() * ratio;  // K x T
  const Eigen::VectorXd denom = W.colwise().sum().cwiseMax(kEpsilon);
  Eigen::MatrixXd out = denom.cwiseInverse().asDiagonal() *
                        H.cwiseProduct(numer);
  return out.cwiseMax(kEpsilon);
}

Eigen::MatrixXd update_bases(const Eigen::ArrayXXd& X,
                             const Eigen::MatrixXd& W,
                             const Eigen::MatrixXd& H) {
  check_shapes(X, W, H);
  const Eigen::ArrayXXd model = (W * H).array().max(kEpsilon);
  const Eigen::MatrixXd ratio = (X / model).matrix();
  const Eigen::MatrixXd numer = ratio * H.transpose();  // F x K
  const Eigen::VectorXd denom = H.rowwise().sum().cwiseMax(kEpsilon);
  Eigen::MatrixXd out = W.cwiseProduct(numer) *
                        denom.cwiseInverse().asDiagonal();
  return out.cwiseMax(kEpsilon);
}

void renormalize(Eigen::MatrixXd& W, Eigen::MatrixXd& H,
                 std::vector<int>* reset_columns) {
  if (W.cols() != H.rows())
    throw std::invalid_argument("nmf: W columns must match H rows");
  const auto num_bins = W.rows();
  for (Eigen::Index k = 0; k < W.cols(); ++k) {
    const double sum = W.col(k).sum();
    if (sum > 0.0) {
      W.col(k) /= sum;
      H.row(k) *= sum;
    } else {
      W.col(k).setConstant(1.0 / static_cast<double>(num_bins));
      H.row(k).setZero();
      if (reset_columns) reset_columns->push_back(static_cast<int>(k));
    }
  }
}

double kl_divergence(const Eigen::ArrayXXd& X, const Eigen::ArrayXXd& Xhat) {
  if (X.rows() != Xhat.rows() || X.cols() != Xhat.cols())
    throw std::invalid_argument("nmf: divergence shapes differ");
  double d = 0.0;
  for (Eigen::Index t = 0; t < X.cols(); ++t)
    for (Eigen::Index f = 0; f < X.rows(); ++f) {
      const double x = X(f, t);
      const double y = std::max(Xhat(f, t), kEpsilon);
      d += (x > 0.0 ? x * std::log(x / y) - x : 0.0) + y;
    }
  return d;
}

}  // namespace envsep::nmf
