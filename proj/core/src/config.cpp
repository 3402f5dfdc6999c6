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

#include "envsep/config.hpp"

#include <algorithm>
#include <stdexcept>

namespace envsep {

double ConstraintSchedule::alpha_at(int iteration) const {
  if (alpha_fixed) return std::clamp(*alpha_fixed, 0.0, 1.0);
  return std::clamp(alpha_step * iteration, 0.0, 1.0);
}

void ConstraintSchedule::validate() const {
  if (alpha_step < 0.0)
    throw std::invalid_argument("schedule: alpha_step must be >= 0");
  if (alpha_fixed && (*alpha_fixed < 0.0 || *alpha_fixed > 1.0))
    throw std::invalid_argument("schedule: fixed alpha must lie in [0, 1]");
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("schedule: beta must lie in [0, 1]");
  if (weight_exponent < 0.0)
    throw std::invalid_argument("schedule: weight exponent p must be >= 0");
}

void SeparationConfig::validate() const {
  if (!(sample_rate > 0.0))
    throw std::invalid_argument("config: sample rate must be positive");
  if (frame_size <= 0 || (frame_size & (frame_size - 1)) != 0)
    throw std::invalid_argument("config: frame size must be a power of two");
  if (hop_size <= 0 || hop_size > frame_size || frame_size % hop_size != 0)
    throw std::invalid_argument("config: hop must divide the frame size");
  if (iterations <= 0)
    throw std::invalid_argument("config: iterations must be positive");
  if (bases_per_instrument <= 0)
    throw std::invalid_argument("config: bases per instrument must be positive");
  if (lpc_order < 1 || lpc_order > 32)
    throw std::invalid_argument("config: LPC order must be in 1..32");
  schedule.validate();
}

std::string to_string(InitMode mode) {
  return mode == InitMode::normal ? "normal" : "sparse";
}

std::string to_string(ReconstructionMode mode) {
  return mode == ReconstructionMode::direct ? "direct" : "soft_mask";
}

InitMode init_mode_from_string(const std::string& s) {
  if (s == "normal") return InitMode::normal;
  if (s == "sparse") return InitMode::sparse;
  throw std::invalid_argument("config: unknown init mode '" + s + "'");
}

ReconstructionMode reconstruction_mode_from_string(const std::string& s) {
  if (s == "direct") return ReconstructionMode::direct;
  if (s == "soft_mask") return ReconstructionMode::soft_mask;
  throw std::invalid_argument("config: unknown reconstruction mode '" + s + "'");
}

}  // namespace envsep
