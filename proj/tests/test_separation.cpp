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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "envsep/harness.hpp"
#include "envsep/metrics.hpp"
#include "envsep/separation.hpp"
#include "support/oracles.hpp"

using namespace envsep;

namespace {

constexpr double kRate = 8000.0;

// compact configuration so each run takes a fraction of a second
SeparationConfig small_config(std::uint64_t seed) {
  SeparationConfig config;
  config.sample_rate = kRate;
  config.frame_size = 512;
  config.hop_size = 128;
  config.iterations = 50;
  config.bases_per_instrument = 8;
  config.seed = seed;
  return config;
}

harness::MixtureSpec two_instrument_spec(std::uint64_t seed) {
  harness::MixtureSpec spec;
  spec.sample_rate = kRate;
  spec.duration = 1.5;
  spec.notes_per_instrument = 6;
  spec.seed = 100 + seed;
  for (int inst = 0; inst < 2; ++inst) {
    const auto preset =
        harness::synth_preset(harness::SynthKind::harmonic, inst, kRate);
    harness::InstrumentSpec is;
    is.note_clips =
        harness::synth_note_clips(preset, 5, 50 + seed * 2 + inst);
    AudioSignal cat;
    cat.sample_rate = kRate;
    for (const auto& c :
         harness::synth_note_clips(preset, 5, 900 + seed * 2 + inst))
      cat.samples.insert(cat.samples.end(), c.samples.begin(),
                         c.samples.end());
    is.training_clip = cat;
    spec.instruments.push_back(is);
  }
  return spec;
}

std::vector<AudioSignal> training_clips(const harness::MixtureSpec& spec) {
  std::vector<AudioSignal> clips;
  for (const auto& inst : spec.instruments)
    clips.push_back(harness::training_clip(inst));
  return clips;
}

double mean_sdr(const metrics::MetricsReport& r) {
  double s = 0.0;
  for (const auto& m : r.per_source) s += m.sdr;
  return s / static_cast<double>(r.per_source.size());
}

}  // namespace

TEST_CASE("reconstruct_sources splits W*H additively") {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd W(20, 6), H(6, 15);
  for (int k = 0; k < 6; ++k) {
    for (int f = 0; f < 20; ++f) W(f, k) = oracles::uniform01(rng);
    for (int t = 0; t < 15; ++t) H(k, t) = oracles::uniform01(rng);
  }
  SpectrogramGeometry geom{64, 16, kRate, 0};

  SUBCASE("a single group is the full product") {
    const auto parts =
        reconstruct_sources(W, H, nmf::Partition::contiguous(6, 1), geom);
    REQUIRE(parts.size() == 1);
    CHECK((parts[0].values.matrix() - W * H).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("two groups sum back to the full product") {
    const auto parts =
        reconstruct_sources(W, H, nmf::Partition::contiguous(6, 2), geom);
    REQUIRE(parts.size() == 2);
    const Eigen::MatrixXd sum =
        (parts[0].values + parts[1].values).matrix();
    CHECK((sum - W * H).cwiseAbs().maxCoeff() <
          1e-12 * (W * H).maxCoeff());
  }

  SUBCASE("each part matches the column-subset product oracle") {
    const auto partition = nmf::Partition::contiguous(6, 3);
    const auto parts = reconstruct_sources(W, H, partition, geom);
    for (std::size_t g = 0; g < partition.groups.size(); ++g) {
      Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(20, 15);
      for (int k : partition.groups[g])
        expect += W.col(k) * H.row(k);  // outer-product oracle
      CHECK((parts[g].values.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("informed separation assigns a solo recording to its instrument") {
  const auto spec = two_instrument_spec(0);
  // the mixture is instrument 0 alone
  harness::MixtureSpec solo = spec;
  solo.instruments.resize(1);
  const auto generated = harness::generate_mixture(solo);

  const auto result = separate_informed(generated.mixture,
                                        training_clips(spec), small_config(7));
  REQUIRE(result.sources.size() == 2);
  const double e0 = oracles::energy(result.sources[0].samples);
  const double e1 = oracles::energy(result.sources[1].samples);
  CHECK(e0 / (e0 + e1) > 0.9);
}

TEST_CASE("informed separation reaches 10 dB on disjoint-envelope mixtures") {
  const auto spec = two_instrument_spec(1);
  const auto generated = harness::generate_mixture(spec);
  const auto result = separate_informed(generated.mixture,
                                        training_clips(spec), small_config(8));
  const auto report =
      metrics::evaluate_permuted(result.sources, generated.ground_truth, 256);
  for (const auto& m : report.per_source) CHECK(m.sdr >= 10.0);

  // outputs match the mixture length and rate
  for (const auto& s : result.sources) {
    CHECK(s.size() == generated.mixture.size());
    CHECK(s.sample_rate == kRate);
  }
  CHECK(result.divergence_trace.size() == 50);
}

TEST_CASE("blind separation clears 3 dB and stays below informed") {
  double blind_sum = 0.0, informed_sum = 0.0;
  Eigen::Vector2d blind_per_source = Eigen::Vector2d::Zero();
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const auto spec = two_instrument_spec(static_cast<std::uint64_t>(s));
    const auto generated = harness::generate_mixture(spec);
    const auto config = small_config(9000 + static_cast<std::uint64_t>(s));

    const auto blind = separate_blind(generated.mixture, 2, config);
    const auto blind_report =
        metrics::evaluate_permuted(blind.sources, generated.ground_truth, 256);
    blind_sum += mean_sdr(blind_report);
    // accumulate per reference track, not per estimate index
    for (std::size_t est = 0; est < blind_report.per_source.size(); ++est)
      blind_per_source(blind_report.permutation[est]) +=
          blind_report.per_source[est].sdr;

    const auto informed = separate_informed(generated.mixture,
                                            training_clips(spec), config);
    informed_sum += mean_sdr(
        metrics::evaluate_permuted(informed.sources, generated.ground_truth, 256));
  }
  // per-reference means over seeds
  CHECK(blind_per_source(0) / seeds >= 3.0);
  CHECK(blind_per_source(1) / seeds >= 3.0);
  CHECK(blind_sum / seeds <= informed_sum / seeds);
}

TEST_CASE("separation results are deterministic per seed") {
  const auto spec = two_instrument_spec(3);
  const auto generated = harness::generate_mixture(spec);
  const auto config = small_config(77);

  const auto a = separate_blind(generated.mixture, 2, config);
  const auto b = separate_blind(generated.mixture, 2, config);
  REQUIRE(a.sources.size() == b.sources.size());
  for (std::size_t i = 0; i < a.sources.size(); ++i)
    CHECK(a.sources[i].samples == b.sources[i].samples);  // byte identical
  for (std::size_t i = 0; i < a.per_source_spectrograms.size(); ++i)
    CHECK((a.per_source_spectrograms[i].values ==
           b.per_source_spectrograms[i].values)
              .all());
  CHECK(a.divergence_trace == b.divergence_trace);
}

TEST_CASE("soft-mask sources add back to the mixture") {
  const auto spec = two_instrument_spec(4);
  const auto generated = harness::generate_mixture(spec);
  const auto result =
      separate_blind(generated.mixture, 2, small_config(5));

  std::vector<double> sum(generated.mixture.size(), 0.0);
  for (const auto& s : result.sources)
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s.samples[i];
  double err = 0.0;
  for (std::size_t i = 0; i < sum.size(); ++i) {
    const double d = sum[i] - generated.mixture.samples[i];
    err += d * d;
  }
  const double rel =
      10.0 * std::log10(err / oracles::energy(generated.mixture.samples));
  CHECK(rel < -60.0);
}

TEST_CASE("the unconstrained baseline has a non-increasing divergence") {
  const auto spec = two_instrument_spec(5);
  const auto generated = harness::generate_mixture(spec);

  SUBCASE("via inert blind constraint (beta = 1)") {
    auto config = small_config(6);
    config.schedule.beta = 1.0;
    const auto result = separate_blind(generated.mixture, 2, config);
    for (std::size_t l = 1; l < result.divergence_trace.size(); ++l)
      CHECK(result.divergence_trace[l] <=
            result.divergence_trace[l - 1] + 1e-9);
  }

  SUBCASE("via inert informed constraint (alpha fixed at 1)") {
    auto config = small_config(6);
    config.schedule.alpha_fixed = 1.0;
    const auto result = separate_informed(generated.mixture,
                                          training_clips(spec), config);
    for (std::size_t l = 1; l < result.divergence_trace.size(); ++l)
      CHECK(result.divergence_trace[l] <=
            result.divergence_trace[l - 1] + 1e-9);
  }
}

TEST_CASE("constrained runs keep a finite divergence trace") {
  const auto spec = two_instrument_spec(6);
  const auto generated = harness::generate_mixture(spec);
  const auto result = separate_blind(generated.mixture, 2, small_config(6));
  for (double d : result.divergence_trace) CHECK(std::isfinite(d));
}

TEST_CASE("input validation") {
  const auto spec = two_instrument_spec(7);
  const auto generated = harness::generate_mixture(spec);
  const auto config = small_config(1);

  AudioSignal empty;
  empty.sample_rate = kRate;
  CHECK_THROWS_AS(separate_blind(empty, 2, config), std::invalid_argument);
  CHECK_THROWS_AS(separate_blind(generated.mixture, 1, config),
                  std::invalid_argument);

  // silent clip is rejected by envelope training
  std::vector<AudioSignal> clips = training_clips(spec);
  clips[1].samples.assign(clips[1].samples.size(), 0.0);
  CHECK_THROWS_AS(separate_informed(generated.mixture, clips, config),
                  std::invalid_argument);
  clips.pop_back();
  CHECK_THROWS_AS(separate_informed(generated.mixture, clips, config),
                  std::invalid_argument);

  // clip sample rate must match the mixture
  clips = training_clips(spec);
  clips[0].sample_rate = 16000.0;
  CHECK_THROWS_AS(separate_informed(generated.mixture, clips, config),
                  std::invalid_argument);
}

TEST_CASE("run manifest echoes the configuration") {
  const auto spec = two_instrument_spec(8);
  const auto generated = harness::generate_mixture(spec);
  auto config = small_config(123);
  config.schedule.weight_exponent = 3.0;
  const auto result = separate_blind(generated.mixture, 2, config);

  std::ostringstream out;
  write_run_manifest(out, result, "blind");
  const std::string text = out.str();
  CHECK(text.find("mode=blind") != std::string::npos);
  CHECK(text.find("seed=123") != std::string::npos);
  CHECK(text.find("p=3") != std::string::npos);
  CHECK(text.find("divergence_trace=") != std::string::npos);
}
