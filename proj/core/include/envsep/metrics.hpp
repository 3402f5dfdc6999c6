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

#ifndef ENVSEP_METRICS_HPP
#define ENVSEP_METRICS_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "envsep/audio.hpp"

namespace envsep::metrics {

/// Reported dB values are capped to [-120, 120].
inline constexpr double kDbCap = 120.0;

/// Default number of time-invariant projection filter taps.
inline constexpr int kDefaultFilterLength = 512;

/// Orthogonal split of an estimate into target, interference and artifact.
/// The parts live on the zero-padded support of length n + L - 1 (projection
/// filters of length L smear past the signal end); they sum to the
/// zero-padded estimate exactly and are mutually orthogonal by construction.
struct BssDecomposition {
  Eigen::VectorXd s_target;
  Eigen::VectorXd e_interf;
  Eigen::VectorXd e_artif;
};

struct SourceMetrics {
  double sdr = 0.0;
  double sir = 0.0;
  double sar = 0.0;
};

/// Per-source metrics under the best estimate-to-reference assignment.
/// permutation[i] is the reference index matched to estimate i.
struct MetricsReport {
  std::vector<SourceMetrics> per_source;
  std::vector<int> permutation;
};

/// Projects the estimate onto the span of 0..L-1 sample delays of the target
/// reference (s_target) and of all references (s_target + e_interf); the
/// remainder is e_artif. Gram systems are solved exactly; a rank-deficient
/// basis is ridge-regularized with lambda = 1e-9 * trace(G).
/// Requires equal lengths >= filter_length and no all-zero reference.
BssDecomposition decompose(const AudioSignal& estimate,
                           const std::vector<AudioSignal>& references,
                           int target_index,
                           int filter_length = kDefaultFilterLength);

/// 20 log10(||s_target|| / ||e_interf + e_artif||), capped.
double sdr(const BssDecomposition& d);
/// 20 log10(||s_target|| / ||e_interf||), capped.
double sir(const BssDecomposition& d);
/// 20 log10(||s_target + e_interf|| / ||e_artif||), capped.
double sar(const BssDecomposition& d);

/// Evaluates every estimate-to-reference assignment and returns the metrics
/// for the permutation with the highest mean SDR. Counts must match.
MetricsReport evaluate_permuted(const std::vector<AudioSignal>& estimates,
                                const std::vector<AudioSignal>& references,
                                int filter_length = kDefaultFilterLength);

/// CSV with columns: source_id,permuted_ref,SDR,SIR,SAR.
void write_csv(std::ostream& out, const MetricsReport& report);

}  // namespace envsep::metrics

#endif  // ENVSEP_METRICS_HPP
