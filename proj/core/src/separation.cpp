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

#include "envsep/separation.hpp"

#include <functional>
#include <ostream>
#include <stdexcept>

#include "envsep/constraint.hpp"
#include "envsep/lpc.hpp"

namespace envsep {
namespace {

// W <- constrain(What, Hnew, iteration) after the two multiplicative updates
// and the scale exchange, matching the paper's per-iteration ordering.
using ConstraintFn = std::function<Eigen::MatrixXd(
    const Eigen::MatrixXd&, const Eigen::MatrixXd&, int)>;

SeparationResult run_pipeline(const AudioSignal& mixture, int num_instruments,
                              const SeparationConfig& config,
                              const ConstraintFn& constrain) {
  config.validate();
  if (mixture.empty())
    throw std::invalid_argument("separate: empty mixture signal");
  if (num_instruments < 2)
    throw std::invalid_argument("separate: need at least two instruments");

  const ComplexSpectrogram spec =
      stft(mixture, config.frame_size, config.hop_size);
  const MagnitudeSpectrogram mag = magnitude(spec);
  const Eigen::ArrayXXd& X = mag.values;

  const int num_bases = num_instruments * config.bases_per_instrument;
  const nmf::Partition partition =
      nmf::Partition::contiguous(num_bases, num_instruments);

  Eigen::MatrixXd W = nmf::init_bases(mag.num_bins(), num_bases,
                                      config.init_mode, config.seed);
  Eigen::MatrixXd H = nmf::init_activations(num_bases, mag.num_frames(),
                                            config.seed + 0x9e3779b97f4a7c15ULL);

  SeparationResult result;
  result.config_echo = config;
  result.divergence_trace.reserve(static_cast<std::size_t>(config.iterations));

  for (int l = 0; l < config.iterations; ++l) {
    Eigen::MatrixXd H_hat = nmf::update_activations(X, W, H);
    Eigen::MatrixXd W_tilde = nmf::update_bases(X, W, H_hat);
    nmf::renormalize(W_tilde, H_hat);
    W = constrain(W_tilde, H_hat, l);
    H = std::move(H_hat);
    result.divergence_trace.push_back(
        nmf::kl_divergence(X, (W * H).array()));
  }

  result.per_source_spectrograms =
      reconstruct_sources(W, H, partition, mag.geom);
  const std::vector<ComplexSpectrogram> source_bins = masked_reconstruct(
      result.per_source_spectrograms, spec, config.reconstruction_mode);
  result.sources.reserve(source_bins.size());
  for (const auto& bins : source_bins) result.sources.push_back(istft(bins));
  return result;
}

}  // namespace

SeparationResult separate_informed(const AudioSignal& mixture,
                                   const std::vector<AudioSignal>& clips,
                                   const SeparationConfig& config) {
  if (clips.size() < 2)
    throw std::invalid_argument("separate: need at least two instrument clips");
  for (const auto& clip : clips)
    if (clip.sample_rate != mixture.sample_rate)
      throw std::invalid_argument(
          "separate: clip sample rate differs from mixture");

  std::vector<lpc::Envelope> envelopes;
  envelopes.reserve(clips.size());
  for (const auto& clip : clips)
    envelopes.push_back(lpc::train_true_envelope(clip, config));

  const int num_instruments = static_cast<int>(clips.size());
  const nmf::Partition partition = nmf::Partition::contiguous(
      num_instruments * config.bases_per_instrument, num_instruments);
  return run_pipeline(
      mixture, num_instruments, config,
      [&](const Eigen::MatrixXd& W, const Eigen::MatrixXd&, int iteration) {
        return constraint::apply_informed(W, envelopes, partition,
                                          config.schedule.alpha_at(iteration),
                                          config.lpc_order);
      });
}

SeparationResult separate_blind(const AudioSignal& mixture,
                                int num_instruments,
                                const SeparationConfig& config) {
  if (num_instruments < 2)
    throw std::invalid_argument("separate: need at least two instruments");
  const nmf::Partition partition = nmf::Partition::contiguous(
      num_instruments * config.bases_per_instrument, num_instruments);
  return run_pipeline(
      mixture, num_instruments, config,
      [&](const Eigen::MatrixXd& W, const Eigen::MatrixXd& H, int) {
        return constraint::apply_blind(W, H, partition, config.schedule.beta,
                                       config.schedule.weight_exponent,
                                       config.lpc_order);
      });
}

std::vector<MagnitudeSpectrogram> reconstruct_sources(
    const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
    const nmf::Partition& partition, const SpectrogramGeometry& geom) {
  if (W.cols() != H.rows())
    throw std::invalid_argument("reconstruct: W columns must match H rows");
  partition.validate(static_cast<int>(W.cols()));

  std::vector<MagnitudeSpectrogram> out;
  out.reserve(partition.groups.size());
  for (const auto& group : partition.groups) {
    const auto size = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXd Wg(W.rows(), size);
    Eigen::MatrixXd Hg(size, H.cols());
    for (Eigen::Index i = 0; i < size; ++i) {
      Wg.col(i) = W.col(group[static_cast<std::size_t>(i)]);
      Hg.row(i) = H.row(group[static_cast<std::size_t>(i)]);
    }
    MagnitudeSpectrogram source;
    source.geom = geom;
    source.values = (Wg * Hg).array();
    out.push_back(std::move(source));
  }
  return out;
}

void write_run_manifest(std::ostream& out, const SeparationResult& result,
                        const std::string& mode) {
  const SeparationConfig& c = result.config_echo;
  out << "mode=" << mode << "\n";
  out << "sample_rate=" << c.sample_rate << "\n";
  out << "frame_size=" << c.frame_size << "\n";
  out << "hop_size=" << c.hop_size << "\n";
  out << "iterations=" << c.iterations << "\n";
  out << "bases_per_instrument=" << c.bases_per_instrument << "\n";
  out << "lpc_order=" << c.lpc_order << "\n";
  out << "init=" << to_string(c.init_mode) << "\n";
  out << "alpha_step=" << c.schedule.alpha_step << "\n";
  if (c.schedule.alpha_fixed)
    out << "alpha_fixed=" << *c.schedule.alpha_fixed << "\n";
  out << "beta=" << c.schedule.beta << "\n";
  out << "p=" << c.schedule.weight_exponent << "\n";
  out << "recon=" << to_string(c.reconstruction_mode) << "\n";
  out << "seed=" << c.seed << "\n";
  out << "sources=" << result.sources.size() << "\n";
  out << "divergence_trace=";
  for (std::size_t i = 0; i < result.divergence_trace.size(); ++i) {
    if (i) out << ',';
    out << result.divergence_trace[i];
  }
  out << "\n";
}

}  // namespace envsep
