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

#ifndef ENVSEP_AUDIO_HPP
#define ENVSEP_AUDIO_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace envsep {

/// Single-channel audio held as doubles, nominally in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  double sample_rate = 44100.0;

  AudioSignal() = default;
  AudioSignal(std::vector<double> s, double rate)
      : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }

  /// Throws std::invalid_argument on non-finite samples or rate <= 0.
  void validate() const;
};

enum class WavFormat { pcm16, pcm24, float32 };

/// Reads a RIFF/WAVE file. Accepts PCM 16/24-bit and IEEE float 32-bit
/// (plain or WAVE_FORMAT_EXTENSIBLE). Multi-channel input is downmixed by
/// averaging across channels; a warning is printed to stderr when that
/// happens.
AudioSignal read_wav(const std::string& path);

/// Writes a mono WAV file. float32 is the default since separated sources may
/// exceed full scale; PCM writes clip to [-1, 1].
void write_wav(const std::string& path, const AudioSignal& signal,
               WavFormat format = WavFormat::float32);

}  // namespace envsep

#endif  // ENVSEP_AUDIO_HPP
