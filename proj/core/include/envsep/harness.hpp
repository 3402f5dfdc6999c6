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

#ifndef ENVSEP_HARNESS_HPP
#define ENVSEP_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "envsep/audio.hpp"
#include "envsep/config.hpp"

namespace envsep::harness {

// ---------------------------------------------------------------------------
// Synthetic instruments. All-pole-filtered excitations: impulse trains for
// harmonic instruments, noise bursts for percussive ones, so the whole
// pipeline runs without any external dataset.
// ---------------------------------------------------------------------------

enum class SynthKind { harmonic, percussive };

struct SynthInstrument {
  SynthKind kind = SynthKind::harmonic;
  double sample_rate = 44100.0;
  std::vector<double> resonances_hz;  // all-pole resonance centers
  double pole_radius = 0.97;
  double base_frequency = 220.0;  // lowest f0 (harmonic only)
  int num_pitches = 5;            // semitone-stacked pitch choices
  double note_duration = 0.5;     // seconds
  double decay_time = 0.25;       // excitation amplitude decay (seconds)
  // Per-note richness; all default to plain stationary notes. Raising them
  // makes single notes span several spectral templates, like real playing.
  double vibrato_depth = 0.0;   // fractional pitch-period modulation
  double vibrato_rate = 5.0;    // Hz
  double attack_noise = 0.0;    // broadband onset burst, relative level
  double detune_spread = 0.0;   // per-note random resonance scatter
  std::string name = "synth";
};

/// Built-in presets with well-separated spectral envelopes. Even variants
/// concentrate energy low, odd variants high.
SynthInstrument synth_preset(SynthKind kind, int variant, double sample_rate);

/// One note, deterministic per (instrument, pitch_index, seed).
AudioSignal synth_note(const SynthInstrument& instrument, int pitch_index,
                       std::uint64_t seed);

/// A bag of note clips cycling through the instrument's pitches.
std::vector<AudioSignal> synth_note_clips(const SynthInstrument& instrument,
                                          int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Mixture generation.
// ---------------------------------------------------------------------------

struct InstrumentSpec {
  std::vector<AudioSignal> note_clips;
  AudioSignal training_clip;  // empty -> concatenation of note_clips
  bool repeat_single_clip = false;  // drum-style: one excerpt placed N times
  std::string name;
};

struct MixtureSpec {
  std::vector<InstrumentSpec> instruments;
  double duration = 10.0;  // seconds; must cover the longest clip
  int notes_per_instrument = 10;
  double sample_rate = 44100.0;
  std::uint64_t seed = 0;
};

struct GeneratedMixture {
  AudioSignal mixture;
  std::vector<AudioSignal> ground_truth;  // sums to mixture exactly
  std::vector<std::string> names;
};

/// Places notes (sampled with replacement, uniform onsets) per instrument,
/// scales the per-instrument tracks to equal total energy and sums them.
/// A clip longer than the duration is an error.
GeneratedMixture generate_mixture(const MixtureSpec& spec);

/// Training clip for informed separation: the explicit training_clip if set,
/// otherwise the instrument's note clips concatenated.
AudioSignal training_clip(const InstrumentSpec& instrument);

/// Mixture spec file (key=value):
///   duration, notes_per_instrument, sample_rate, seed
///   instrument=dir:<path>[:repeat]      one line per instrument; a
///   instrument=synth:<kind>:<variant>   directory holds WAV note clips
/// An optional sibling `training=...` line after an instrument line
/// overrides its envelope-training audio.
MixtureSpec load_mixture_spec(const std::string& path);

// ---------------------------------------------------------------------------
// Parameter sweeps.
// ---------------------------------------------------------------------------

enum class SweepVariable { p, bases, init_mode, alpha_schedule };

struct SweepSpec {
  SweepVariable variable = SweepVariable::p;
  std::vector<std::string> values;  // parsed per variable
  int repetitions = 1;
  std::string mode = "blind";  // blind | informed
  std::vector<MixtureSpec> mixtures;
};

SweepVariable sweep_variable_from_string(const std::string& s);
std::string to_string(SweepVariable v);

/// Sweep spec file (key=value): variable, values (comma list), repetitions,
/// mode, and one `mixture=<mixture spec path>` line per mixture. Remaining
/// keys override SeparationConfig fields (iterations, bases, lpc_order,
/// frame_size, hop_size, init, p, alpha_step, beta, recon, seed).
SweepSpec load_sweep_spec(const std::string& path, SeparationConfig* base);

/// Runs every (value, mixture, repetition) cell: generate the mixture,
/// separate, evaluate against ground truth, and append one CSV row per
/// source. A failed cell becomes a row with error=1 and the sweep continues.
/// Per-value summary rows (mean SDR/SIR/SAR) follow the data rows. Output is
/// deterministic for fixed seeds, ordered by cell index.
void run_sweep(const SweepSpec& sweep, const SeparationConfig& base_config,
               const std::vector<MixtureSpec>& mixtures, std::ostream& csv);

}  // namespace envsep::harness

#endif  // ENVSEP_HARNESS_HPP
