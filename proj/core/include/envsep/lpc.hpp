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

#ifndef ENVSEP_LPC_HPP
#define ENVSEP_LPC_HPP

#include <Eigen/Dense>

#include "envsep/audio.hpp"
#include "envsep/config.hpp"

namespace envsep::lpc {

/// All-pole model 1 / (1 - sum_m a_m z^-m). a_0 == 1 is implicit; coeffs
/// holds a_1..a_M. gain is the L1-normalization constant of the matching
/// envelope (filled by envelope_from_lpc / split_basis).
struct LpcModel {
  Eigen::VectorXd coeffs;
  double gain = 1.0;
  bool clamped = false;  // prediction-error variance hit the floor

  int order() const { return static_cast<int>(coeffs.size()); }
};

/// Strictly positive spectral envelope with unit L1 norm.
struct Envelope {
  Eigen::VectorXd values;

  int size() const { return static_cast<int>(values.size()); }
};

/// Nonnegative excitation spectrum; envelope .* excitation rebuilds the
/// basis column it was split from.
struct Excitation {
  Eigen::VectorXd values;
};

/// Autocorrelation lags r(0)..r(M). r(0) >= |r(m)| holds by construction
/// (the lags come from a nonnegative power spectrum).
struct AutocorrelationVector {
  Eigen::VectorXd lags;

  int order() const { return static_cast<int>(lags.size()) - 1; }
};

struct BasisSplit {
  Envelope envelope;
  Excitation excitation;
  LpcModel model;
};

/// Autocorrelation of the signal whose one-sided magnitude spectrum is mag
/// (Wiener-Khinchin): mirror to a Hermitian full power spectrum of length
/// 2*(F-1), inverse-FFT, keep lags 0..order. A relative spectral floor of
/// 1e-12 * max(mag) is added first so degenerate bases stay well-conditioned.
/// Requires mag not all zero and order < F.
AutocorrelationVector autocorr_from_magnitude(const Eigen::VectorXd& mag,
                                              int order);

/// Solves the order-M Yule-Walker system in O(M^2). Requires r(0) > 0. A
/// vanishing prediction-error variance mid-recursion is clamped to
/// 1e-12 * r(0) and the result is flagged via LpcModel::clamped. The clamp is
/// relative so that scaling the input spectrum cannot change the coefficients.
LpcModel levinson_durbin(const AutocorrelationVector& r);

/// All-pole magnitude response at bins f = 0..num_bins-1 of the DFT grid of
/// length frame_size, L1-normalized:
///   v_f = gain / |1 - sum_m a_m exp(-i 2 pi f m / frame_size)|.
/// Denominators below 1e-12 (pole on the unit circle) are floored; the
/// non-const overload records the floor event and the gain in the model.
Envelope envelope_from_lpc(LpcModel& model, int num_bins, int frame_size);
Envelope envelope_from_lpc(const LpcModel& model, int num_bins,
                           int frame_size);

/// Splits a nonnegative basis column into envelope and excitation:
/// v from the LPC fit of w, e = w ./ v, so v .* e == w exactly.
/// The implied FFT length is 2 * (w.size() - 1).
BasisSplit split_basis(const Eigen::VectorXd& w, int order);

/// Trains an instrument envelope from an audio clip: per-frame envelopes of
/// the clip's magnitude spectrogram, combined as the ||frame||_1-weighted
/// mean and renormalized. Frames with L1 norm <= 1e-10 are skipped; if all
/// frames are that quiet the clip is rejected. Requires the clip to be at
/// least one frame long.
Envelope train_true_envelope(const AudioSignal& clip,
                             const SeparationConfig& config);

}  // namespace envsep::lpc

#endif  // ENVSEP_LPC_HPP
