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

#include "envsep/spectrogram.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "envsep/fft.hpp"

namespace envsep {
namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_geometry(const SpectrogramGeometry& g) {
  if (!is_power_of_two(g.frame_size))
    throw std::invalid_argument("spectrogram: frame size must be a power of two");
  if (g.hop_size <= 0 || g.hop_size > g.frame_size)
    throw std::invalid_argument("spectrogram: need 0 < hop <= frame size");
  if (g.frame_size % g.hop_size != 0)
    throw std::invalid_argument(
        "spectrogram: frame size must be divisible by hop size");
}

void check_spec(const ComplexSpectrogram& spec) {
  check_geometry(spec.geom);
  if (spec.bins.rows() != spec.geom.num_bins() || spec.bins.cols() < 1)
    throw std::invalid_argument("spectrogram: bins shape does not match geometry");
  const std::size_t hop = static_cast<std::size_t>(spec.geom.hop_size);
  if (spec.geom.num_samples > 0 &&
      spec.geom.num_samples / hop + 1 != static_cast<std::size_t>(spec.bins.cols()))
    throw std::invalid_argument(
        "spectrogram: frame count does not match num_samples");
}

}  // namespace

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
  return w;
}

ComplexSpectrogram stft(const AudioSignal& signal, int frame_size,
                        int hop_size) {
  if (signal.empty()) throw std::invalid_argument("stft: empty signal");
  SpectrogramGeometry geom{frame_size, hop_size, signal.sample_rate,
                           signal.samples.size()};
  check_geometry(geom);

  const std::size_t n = static_cast<std::size_t>(frame_size);
  const std::size_t hop = static_cast<std::size_t>(hop_size);
  const std::size_t pad = n / 2;
  const std::size_t len = signal.samples.size();
  const std::size_t num_frames = len / hop + 1;

  // Zero-pad by frame_size/2 on both sides; the last frame may also run past
  // the tail, so pad generously once.
  std::vector<double> padded(pad + len + n, 0.0);
  std::copy(signal.samples.begin(), signal.samples.end(),
            padded.begin() + static_cast<std::ptrdiff_t>(pad));

  const std::vector<double> window = hann_window(frame_size);
  ComplexSpectrogram spec;
  spec.geom = geom;
  spec.bins.resize(geom.num_bins(), static_cast<Eigen::Index>(num_frames));

  std::vector<double> frame(n);
  for (std::size_t m = 0; m < num_frames; ++m) {
    const double* src = padded.data() + m * hop;
    for (std::size_t i = 0; i < n; ++i) frame[i] = src[i] * window[i];
    const auto bins = fft::forward_real(frame);
    for (int f = 0; f < geom.num_bins(); ++f)
      spec.bins(f, static_cast<Eigen::Index>(m)) =
          bins[static_cast<std::size_t>(f)];
  }
  return spec;
}

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& spec) {
  MagnitudeSpectrogram mag;
  mag.geom = spec.geom;
  mag.values = spec.bins.cwiseAbs().array();
  return mag;
}

AudioSignal istft(const ComplexSpectrogram& spec) {
  check_spec(spec);
  const std::size_t n = static_cast<std::size_t>(spec.geom.frame_size);
  const std::size_t hop = static_cast<std::size_t>(spec.geom.hop_size);
  const std::size_t pad = n / 2;
  const std::size_t num_frames = static_cast<std::size_t>(spec.bins.cols());
  const std::size_t out_len = spec.geom.num_samples > 0
                                  ? spec.geom.num_samples
                                  : (num_frames - 1) * hop;

  const std::vector<double> window = hann_window(spec.geom.frame_size);
  std::vector<double> numer((num_frames - 1) * hop + n, 0.0);
  std::vector<double> denom(numer.size(), 0.0);

  std::vector<std::complex<double>> bins(n / 2 + 1);
  for (std::size_t m = 0; m < num_frames; ++m) {
    for (std::size_t f = 0; f < bins.size(); ++f)
      bins[f] = spec.bins(static_cast<Eigen::Index>(f),
                          static_cast<Eigen::Index>(m));
    const auto frame = fft::inverse_real(bins, n);
    double* num_dst = numer.data() + m * hop;
    double* den_dst = denom.data() + m * hop;
    for (std::size_t i = 0; i < n; ++i) {
      num_dst[i] += window[i] * frame[i];
      den_dst[i] += window[i] * window[i];
    }
  }

  AudioSignal out;
  out.sample_rate = spec.geom.sample_rate;
  out.samples.resize(out_len, 0.0);
  for (std::size_t i = 0; i < out_len; ++i) {
    const std::size_t p = pad + i;
    if (p < numer.size() && denom[p] > 0.0) out.samples[i] = numer[p] / denom[p];
  }
  return out;
}

std::vector<ComplexSpectrogram> masked_reconstruct(
    const std::vector<MagnitudeSpectrogram>& estimates,
    const ComplexSpectrogram& mixture, ReconstructionMode mode) {
  if (estimates.empty())
    throw std::invalid_argument("masked_reconstruct: need at least one estimate");
  for (const auto& est : estimates)
    if (est.geom != mixture.geom || est.values.rows() != mixture.bins.rows() ||
        est.values.cols() != mixture.bins.cols())
      throw std::invalid_argument(
          "masked_reconstruct: estimate geometry does not match mixture");

  std::vector<ComplexSpectrogram> out(estimates.size());
  for (auto& spec : out) {
    spec.geom = mixture.geom;
    spec.bins.resizeLike(mixture.bins);
  }

  if (mode == ReconstructionMode::direct) {
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      for (Eigen::Index t = 0; t < mixture.bins.cols(); ++t)
        for (Eigen::Index f = 0; f < mixture.bins.rows(); ++f) {
          const std::complex<double> z = mixture.bins(f, t);
          const double m = std::abs(z);
          const std::complex<double> phase =
              m > 0.0 ? z / m : std::complex<double>(1.0, 0.0);
          out[i].bins(f, t) = estimates[i].values(f, t) * phase;
        }
    }
    return out;
  }

  // soft_mask: mixture * est_i / (sum_j est_j + eps)
  constexpr double eps = 1e-12;
  Eigen::ArrayXXd total = estimates[0].values;
  for (std::size_t i = 1; i < estimates.size(); ++i) total += estimates[i].values;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    for (Eigen::Index t = 0; t < mixture.bins.cols(); ++t)
      for (Eigen::Index f = 0; f < mixture.bins.rows(); ++f)
        out[i].bins(f, t) = mixture.bins(f, t) * estimates[i].values(f, t) /
                            (total(f, t) + eps);
  }
  return out;
}

}  // namespace envsep
