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

#ifndef ENVSEP_CONFIG_HPP
#define ENVSEP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "envsep/spectrogram.hpp"

namespace envsep {

enum class InitMode { normal, sparse };

/// Mixing weights for the per-iteration envelope constraint.
/// Informed mode uses alpha(l) = min(alpha_step * l, 1), ramping the bases
/// from fully envelope-replaced toward unconstrained over the run.
/// Blind mode uses the fixed beta together with the activation-weight
/// exponent p for the group envelope average.
struct ConstraintSchedule {
  double alpha_step = 0.01;
  std::optional<double> alpha_fixed;  // set to 1.0 for the plain-NMF baseline
  double beta = 0.0;
  double weight_exponent = 5.0;  // p

  double alpha_at(int iteration) const;
  void validate() const;
};

/// All separation tunables in one place.
struct SeparationConfig {
  double sample_rate = 44100.0;
  int frame_size = 4096;
  int hop_size = 1024;
  int iterations = 100;
  int bases_per_instrument = 40;
  int lpc_order = 4;
  InitMode init_mode = InitMode::normal;
  ConstraintSchedule schedule;
  ReconstructionMode reconstruction_mode = ReconstructionMode::soft_mask;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string to_string(InitMode mode);
std::string to_string(ReconstructionMode mode);
InitMode init_mode_from_string(const std::string& s);
ReconstructionMode reconstruction_mode_from_string(const std::string& s);

}  // namespace envsep

#endif  // ENVSEP_CONFIG_HPP
