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

#include "envsep/lpc.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "envsep/fft.hpp"
#include "envsep/spectrogram.hpp"

namespace envsep::lpc {
namespace {

constexpr double kSpectralFloor = 1e-12;   // relative to max magnitude
constexpr double kVarianceFloor = 1e-12;   // relative to r(0)
constexpr double kDenominatorFloor = 1e-12;

}  // namespace

AutocorrelationVector autocorr_from_magnitude(const Eigen::VectorXd& mag,
                                              int order) {
  const int num_bins = static_cast<int>(mag.size());
  if (num_bins < 2)
    throw std::invalid_argument("lpc: magnitude vector too short");
  if (order < 1 || order >= num_bins)
    throw std::invalid_argument("lpc: need 1 <= order < number of bins");
  const double max_mag = mag.maxCoeff();
  if (!(max_mag > 0.0) || mag.minCoeff() < 0.0)
    throw std::invalid_argument(
        "lpc: magnitude must be nonnegative and not all zero");

  // One-sided power spectrum with a relative floor; the c2r transform below
  // treats it as the half of a Hermitian (mirrored) full spectrum of length
  // 2*(F-1), which is what makes the lags real.
  const std::size_t n = 2 * (static_cast<std::size_t>(num_bins) - 1);
  const double floor = kSpectralFloor * max_mag;
  std::vector<std::complex<double>> power(static_cast<std::size_t>(num_bins));
  for (int f = 0; f < num_bins; ++f) {
    const double v = mag(f) + floor;
    power[static_cast<std::size_t>(f)] = {v * v, 0.0};
  }

  const std::vector<double> corr = fft::inverse_real(power, n);
  AutocorrelationVector r;
  r.lags.resize(order + 1);
  for (int m = 0; m <= order; ++m) r.lags(m) = corr[static_cast<std::size_t>(m)];
  return r;
}

LpcModel levinson_durbin(const AutocorrelationVector& r) {
  const int order = r.order();
  if (order < 1) throw std::invalid_argument("lpc: autocorrelation order < 1");
  const double r0 = r.lags(0);
  if (!(r0 > 0.0))
    throw std::invalid_argument("lpc: r(0) must be positive");

  LpcModel model;
  model.coeffs = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(order);
  double err = r0;
  const double floor = kVarianceFloor * r0;

  for (int m = 1; m <= order; ++m) {
    double acc = r.lags(m);
    for (int j = 1; j < m; ++j) acc -= model.coeffs(j - 1) * r.lags(m - j);
    const double k = acc / err;

    prev.head(m - 1) = model.coeffs.head(m - 1);
    for (int j = 1; j < m; ++j)
      model.coeffs(j - 1) = prev(j - 1) - k * prev(m - 1 - j);
    model.coeffs(m - 1) = k;

    err *= (1.0 - k * k);
    if (err < floor) {
      err = floor;
      model.clamped = true;
    }
  }
  return model;
}

Envelope envelope_from_lpc(LpcModel& model, int num_bins, int frame_size) {
  if (num_bins < 1 || frame_size < 2 * (num_bins - 1))
    throw std::invalid_argument("lpc: inconsistent bin count / frame size");
  const int order = model.order();
  if (order < 1) throw std::invalid_argument("lpc: empty model");
  for (int m = 0; m < order; ++m)
    if (!std::isfinite(model.coeffs(m)))
      throw std::invalid_argument("lpc: non-finite coefficient");

  // Denominator 1 - sum_m a_m z^-m at all bins in one pass: the DFT of the
  // coefficient sequence [1, -a_1, ..., -a_M].
  std::vector<double> poly(static_cast<std::size_t>(frame_size), 0.0);
  poly[0] = 1.0;
  for (int m = 1; m <= order; ++m)
    poly[static_cast<std::size_t>(m)] = -model.coeffs(m - 1);
  const auto spectrum = fft::forward_real(poly);

  Envelope env;
  env.values.resize(num_bins);
  bool floored = false;
  for (int f = 0; f < num_bins; ++f) {
    double d = std::abs(spectrum[static_cast<std::size_t>(f)]);
    if (d < kDenominatorFloor) {
      d = kDenominatorFloor;
      floored = true;
    }
    env.values(f) = 1.0 / d;
  }
  const double sum = env.values.sum();
  model.gain = 1.0 / sum;
  model.clamped = model.clamped || floored;
  env.values *= model.gain;
  return env;
}

Envelope envelope_from_lpc(const LpcModel& model, int num_bins,
                           int frame_size) {
  LpcModel copy = model;
  return envelope_from_lpc(copy, num_bins, frame_size);
}

BasisSplit split_basis(const Eigen::VectorXd& w, int order) {
  const int num_bins = static_cast<int>(w.size());
  const int frame_size = 2 * (num_bins - 1);
  BasisSplit split;
  split.model = levinson_durbin(autocorr_from_magnitude(w, order));
  split.envelope = envelope_from_lpc(split.model, num_bins, frame_size);
  split.excitation.values = w.cwiseQuotient(split.envelope.values);
  return split;
}

Envelope train_true_envelope(const AudioSignal& clip,
                             const SeparationConfig& config) {
  config.validate();
  if (clip.samples.size() < static_cast<std::size_t>(config.frame_size))
    throw std::invalid_argument(
        "lpc: training clip shorter than one analysis frame");

  const MagnitudeSpectrogram mag =
      magnitude(stft(clip, config.frame_size, config.hop_size));
  const int num_bins = mag.num_bins();

  constexpr double kEnergyFloor = 1e-10;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(num_bins);
  bool any = false;
  for (int t = 0; t < mag.num_frames(); ++t) {
    const Eigen::VectorXd frame = mag.values.col(t).matrix();
    const double weight = frame.sum();  // L1, entries are nonnegative
    if (weight <= kEnergyFloor) continue;
    const BasisSplit split = split_basis(frame, config.lpc_order);
    acc += weight * split.envelope.values;
    any = true;
  }
  if (!any)
    throw std::invalid_argument(
        "lpc: silent training clip (all frames below energy floor)");

  Envelope env;
  env.values = acc / acc.sum();
  return env;
}

}  // namespace envsep::lpc
