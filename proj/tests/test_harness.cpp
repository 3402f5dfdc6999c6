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

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "envsep/harness.hpp"
#include "envsep/keyval.hpp"
#include "envsep/separation.hpp"
#include "support/oracles.hpp"

using namespace envsep;
namespace fs = std::filesystem;

namespace {

constexpr double kRate = 8000.0;

harness::InstrumentSpec synth_instrument(int variant, std::uint64_t seed,
                                         int clips = 4) {
  const auto preset =
      harness::synth_preset(harness::SynthKind::harmonic, variant, kRate);
  harness::InstrumentSpec spec;
  spec.note_clips = harness::synth_note_clips(preset, clips, seed);
  spec.name = preset.name;
  return spec;
}

harness::MixtureSpec small_mixture(std::uint64_t seed) {
  harness::MixtureSpec spec;
  spec.sample_rate = kRate;
  spec.duration = 1.5;
  spec.notes_per_instrument = 5;
  spec.seed = seed;
  spec.instruments.push_back(synth_instrument(0, 11 + seed));
  spec.instruments.push_back(synth_instrument(1, 23 + seed));
  return spec;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("envsep_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("synthetic notes are deterministic and bounded") {
  const auto preset =
      harness::synth_preset(harness::SynthKind::harmonic, 0, kRate);
  const auto a = harness::synth_note(preset, 2, 42);
  const auto b = harness::synth_note(preset, 2, 42);
  CHECK(a.samples == b.samples);
  CHECK(a.size() == static_cast<std::size_t>(
                        std::lround(preset.note_duration * kRate)));
  double peak = 0.0;
  for (double v : a.samples) peak = std::max(peak, std::abs(v));
  CHECK(peak == doctest::Approx(0.5).epsilon(1e-12));

  const auto c = harness::synth_note(preset, 2, 43);
  CHECK(a.samples != c.samples);
}

TEST_CASE("percussive presets have no tonal comb") {
  const auto preset =
      harness::synth_preset(harness::SynthKind::percussive, 1, kRate);
  const auto clips = harness::synth_note_clips(preset, 3, 7);
  CHECK(clips.size() == 3);
  for (const auto& clip : clips) CHECK(clip.size() > 0);
  // distinct noise realizations
  CHECK(clips[0].samples != clips[1].samples);
}

TEST_CASE("a single placed note reproduces the clip") {
  harness::MixtureSpec spec;
  spec.sample_rate = kRate;
  spec.duration = 1.0;
  spec.notes_per_instrument = 1;
  spec.seed = 3;
  spec.instruments.push_back(synth_instrument(0, 5, 1));

  const auto generated = harness::generate_mixture(spec);
  REQUIRE(generated.ground_truth.size() == 1);
  CHECK(generated.mixture.samples == generated.ground_truth[0].samples);

  // the track contains exactly the (scaled) clip somewhere
  const auto& clip = spec.instruments[0].note_clips[0];
  const auto& track = generated.mixture.samples;
  std::size_t onset = 0;
  while (onset < track.size() && track[onset] == 0.0) ++onset;
  REQUIRE(onset + clip.size() <= track.size() + 1);
  const double scale = track[onset] / clip.samples[0];
  for (std::size_t i = 0; i < clip.size() && onset + i < track.size(); i += 13)
    CHECK(track[onset + i] ==
          doctest::Approx(scale * clip.samples[i]).epsilon(1e-9));
}

TEST_CASE("instrument tracks carry equal energy and exact additivity") {
  const auto generated = harness::generate_mixture(small_mixture(21));
  REQUIRE(generated.ground_truth.size() == 2);
  const double e0 = oracles::energy(generated.ground_truth[0].samples);
  const double e1 = oracles::energy(generated.ground_truth[1].samples);
  CHECK(e0 / e1 == doctest::Approx(1.0).epsilon(1e-6));

  for (std::size_t i = 0; i < generated.mixture.size(); i += 7) {
    const double sum = generated.ground_truth[0].samples[i] +
                       generated.ground_truth[1].samples[i];
    CHECK(generated.mixture.samples[i] == sum);  // bitwise: same summation
  }
}

TEST_CASE("mixtures are byte-identical across runs") {
  const auto a = harness::generate_mixture(small_mixture(9));
  const auto b = harness::generate_mixture(small_mixture(9));
  CHECK(a.mixture.samples == b.mixture.samples);
  const auto c = harness::generate_mixture(small_mixture(10));
  CHECK(a.mixture.samples != c.mixture.samples);
}

TEST_CASE("repeat flag places one excerpt repeatedly") {
  harness::MixtureSpec spec = small_mixture(4);
  spec.instruments[0].repeat_single_clip = true;
  const auto a = harness::generate_mixture(spec);
  spec.instruments[0].repeat_single_clip = false;
  const auto b = harness::generate_mixture(spec);
  CHECK(a.mixture.samples != b.mixture.samples);
}

TEST_CASE("over-long clips are rejected") {
  harness::MixtureSpec spec = small_mixture(5);
  spec.duration = 0.2;  // shorter than one note
  CHECK_THROWS_AS(harness::generate_mixture(spec), std::invalid_argument);
}

TEST_CASE("mixture spec files round-trip through the parser") {
  TempDir dir;
  const fs::path spec_path = dir.path / "mixture.spec";
  {
    std::ofstream out(spec_path);
    out << "# two synthetic instruments\n"
        << "duration=1.5\n"
        << "notes_per_instrument=4\n"
        << "sample_rate=8000\n"
        << "seed=77\n"
        << "synth_clips=3\n"
        << "instrument=synth:harmonic:0\n"
        << "instrument=synth:percussive:1:repeat\n";
  }
  const auto spec = harness::load_mixture_spec(spec_path.string());
  CHECK(spec.duration == 1.5);
  CHECK(spec.notes_per_instrument == 4);
  CHECK(spec.sample_rate == 8000.0);
  CHECK(spec.seed == 77);
  REQUIRE(spec.instruments.size() == 2);
  CHECK(spec.instruments[0].note_clips.size() == 3);
  CHECK_FALSE(spec.instruments[0].repeat_single_clip);
  CHECK(spec.instruments[1].repeat_single_clip);
  CHECK(spec.instruments[0].training_clip.size() > 0);

  const auto generated = harness::generate_mixture(spec);
  CHECK(generated.mixture.size() == 12000);
}

TEST_CASE("clip directories load as instruments") {
  TempDir dir;
  const fs::path clips = dir.path / "inst_a";
  fs::create_directories(clips);
  const auto preset =
      harness::synth_preset(harness::SynthKind::harmonic, 0, kRate);
  for (int i = 0; i < 3; ++i)
    write_wav((clips / ("note" + std::to_string(i) + ".wav")).string(),
              harness::synth_note(preset, i, static_cast<std::uint64_t>(i)));

  const fs::path spec_path = dir.path / "mixture.spec";
  {
    std::ofstream out(spec_path);
    out << "duration=1.5\nsample_rate=8000\nseed=1\n"
        << "instrument=dir:inst_a\n"
        << "instrument=synth:harmonic:1\n";
  }
  const auto spec = harness::load_mixture_spec(spec_path.string());
  REQUIRE(spec.instruments.size() == 2);
  CHECK(spec.instruments[0].note_clips.size() == 3);
  CHECK(spec.instruments[0].name == "inst_a");

  // unknown kinds are rejected
  {
    std::ofstream out(spec_path);
    out << "instrument=magic:thing\n";
  }
  CHECK_THROWS(harness::load_mixture_spec(spec_path.string()));
}

TEST_CASE("an empty mixture list yields a header-only report") {
  harness::SweepSpec sweep;
  sweep.variable = harness::SweepVariable::p;
  sweep.values = {"0", "5"};
  std::ostringstream csv;
  harness::run_sweep(sweep, SeparationConfig{}, {}, csv);
  // header plus one summary row per value, no data rows
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line ==
        "row,variable,value,mixture,repetition,seed,source_id,ref_id,sdr,sir,"
        "sar,error");
  int runs = 0, summaries = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("run,", 0) == 0) ++runs;
    if (line.rfind("summary,", 0) == 0) ++summaries;
  }
  CHECK(runs == 0);
  CHECK(summaries == 2);
}

TEST_CASE("a p sweep emits a complete deterministic curve") {
  harness::SweepSpec sweep;
  sweep.variable = harness::SweepVariable::p;
  sweep.values = {"0", "2", "5"};
  sweep.repetitions = 1;
  sweep.mode = "blind";

  SeparationConfig base;
  base.sample_rate = kRate;
  base.frame_size = 512;
  base.hop_size = 128;
  base.iterations = 30;
  base.bases_per_instrument = 6;
  base.seed = 5;

  const std::vector<harness::MixtureSpec> mixtures = {small_mixture(31)};
  std::ostringstream a, b;
  harness::run_sweep(sweep, base, mixtures, a);
  harness::run_sweep(sweep, base, mixtures, b);
  CHECK(a.str() == b.str());  // byte-identical reruns

  int runs = 0, summaries = 0, errors = 0;
  std::istringstream lines(a.str());
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    if (line.rfind("run,", 0) == 0) {
      ++runs;
      if (line.back() != '0') ++errors;
    }
    if (line.rfind("summary,", 0) == 0) ++summaries;
  }
  CHECK(runs == 3 * 1 * 1 * 2);  // values x mixtures x reps x sources
  CHECK(summaries == 3);
  CHECK(errors == 0);
}

TEST_CASE("failed cells become error rows and the sweep continues") {
  harness::SweepSpec sweep;
  sweep.variable = harness::SweepVariable::bases;
  sweep.values = {"4"};
  sweep.mode = "blind";

  SeparationConfig base;
  base.sample_rate = kRate;
  base.frame_size = 512;
  base.hop_size = 128;
  base.iterations = 10;

  harness::MixtureSpec bad = small_mixture(33);
  bad.duration = 0.2;  // clips no longer fit: generate_mixture throws
  const std::vector<harness::MixtureSpec> mixtures = {bad, small_mixture(34)};

  std::ostringstream csv;
  harness::run_sweep(sweep, base, mixtures, csv);
  int errors = 0, runs = 0;
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    if (line.rfind("run,", 0) != 0) continue;
    if (line.back() == '1')
      ++errors;
    else
      ++runs;
  }
  CHECK(errors == 1);
  CHECK(runs == 2);  // the good mixture still produced two source rows
}

TEST_CASE("sweep spec files parse and override the base config") {
  TempDir dir;
  const fs::path mix_path = dir.path / "m.spec";
  {
    std::ofstream out(mix_path);
    out << "duration=1.5\nsample_rate=8000\nseed=2\nsynth_clips=3\n"
        << "instrument=synth:harmonic:0\ninstrument=synth:harmonic:1\n";
  }
  const fs::path sweep_path = dir.path / "s.spec";
  {
    std::ofstream out(sweep_path);
    out << "variable=init_mode\nvalues=normal,sparse\nrepetitions=2\n"
        << "mode=blind\nmixture=m.spec\n"
        << "iterations=25\nbases=6\nframe_size=512\nhop_size=128\n"
        << "sample_rate=8000\nseed=9\n";
  }
  SeparationConfig base;
  const auto sweep = harness::load_sweep_spec(sweep_path.string(), &base);
  CHECK(sweep.variable == harness::SweepVariable::init_mode);
  CHECK(sweep.values == std::vector<std::string>{"normal", "sparse"});
  CHECK(sweep.repetitions == 2);
  REQUIRE(sweep.mixtures.size() == 1);
  CHECK(base.iterations == 25);
  CHECK(base.bases_per_instrument == 6);
  CHECK(base.frame_size == 512);
  CHECK(base.seed == 9);
}

// The paper's bases trend (more bases help the blind mode on real
// recordings) does not bind on clean all-pole synthetic notes: both budgets
// saturate, so this sweep only guards against a collapse at the larger
// budget and emits the curve for inspection.
TEST_CASE("blind bases sweep 20 vs 100 stays within a 2 dB band" *
          doctest::timeout(600)) {
  harness::SweepSpec sweep;
  sweep.variable = harness::SweepVariable::bases;
  sweep.values = {"20", "100"};
  sweep.repetitions = 10;  // >= 10 seeds
  sweep.mode = "blind";

  SeparationConfig base;
  base.sample_rate = kRate;
  base.frame_size = 512;
  base.hop_size = 128;
  base.iterations = 40;
  base.seed = 44;

  const std::vector<harness::MixtureSpec> mixtures = {small_mixture(60)};
  std::ostringstream csv;
  harness::run_sweep(sweep, base, mixtures, csv);

  double mean20 = 0.0, mean100 = 0.0;
  std::istringstream lines(csv.str());
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("summary,bases,", 0) != 0) continue;
    const auto fields = split_list(line, ',');
    const double mean = std::stod(fields[4]);
    if (fields[2] == "20")
      mean20 = mean;
    else
      mean100 = mean;
  }
  MESSAGE("blind mean SDR: 20 bases " << mean20 << " dB, 100 bases " << mean100
                                      << " dB");
  CHECK(mean20 > 3.0);
  CHECK(mean100 > 3.0);
  CHECK(mean100 >= mean20 - 2.0);
}
