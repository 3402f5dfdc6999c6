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

#ifndef ENVSEP_SPECTROGRAM_HPP
#define ENVSEP_SPECTROGRAM_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "envsep/audio.hpp"

namespace envsep {

/// Shared frame geometry for spectrogram types. num_samples remembers the
/// analyzed signal length so synthesis can trim the padding exactly.
struct SpectrogramGeometry {
  int frame_size = 0;
  int hop_size = 0;
  double sample_rate = 0.0;
  std::size_t num_samples = 0;

  int num_bins() const { return frame_size / 2 + 1; }
  bool operator==(const SpectrogramGeometry&) const = default;
};

/// One-sided complex STFT, F x T with F = frame_size/2 + 1.
struct ComplexSpectrogram {
  Eigen::MatrixXcd bins;
  SpectrogramGeometry geom;

  int num_bins() const { return static_cast<int>(bins.rows()); }
  int num_frames() const { return static_cast<int>(bins.cols()); }
};

/// Nonnegative magnitudes with the same geometry as the complex spectrogram
/// they came from.
struct MagnitudeSpectrogram {
  Eigen::ArrayXXd values;
  SpectrogramGeometry geom;

  int num_bins() const { return static_cast<int>(values.rows()); }
  int num_frames() const { return static_cast<int>(values.cols()); }
};

enum class ReconstructionMode { direct, soft_mask };

/// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

/// Windowed one-sided STFT. The signal is zero-padded by frame_size/2 on both
/// ends so every sample is covered by full analysis windows; the frame count
/// is floor(len/hop) + 1.
/// Requires: non-empty signal, frame_size a power of two, 0 < hop <= frame,
/// and hop dividing frame (exact overlap-add).
ComplexSpectrogram stft(const AudioSignal& signal, int frame_size,
                        int hop_size);

/// Elementwise modulus.
MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec);

/// Weighted overlap-add synthesis: frames are windowed again and the result
/// is divided by the accumulated squared window, which makes istft(stft(x))
/// exact (up to rounding) for every covered sample, edges included. Output
/// length is geom.num_samples (or (T-1)*hop when num_samples is 0).
AudioSignal istft(const ComplexSpectrogram& spec);

/// Attaches phase to per-source magnitude estimates.
///   direct:    bins_i = estimate_i * phase(mixture)
///   soft_mask: bins_i = mixture * estimate_i / (sum_j estimate_j + 1e-12),
/// so the per-bin outputs sum back to the mixture wherever the estimates are
/// not all zero. Every estimate must share the mixture geometry.
std::vector<ComplexSpectrogram> masked_reconstruct(
    const std::vector<MagnitudeSpectrogram>& estimates,
    const ComplexSpectrogram& mixture, ReconstructionMode mode);

}  // namespace envsep

#endif  // ENVSEP_SPECTROGRAM_HPP
