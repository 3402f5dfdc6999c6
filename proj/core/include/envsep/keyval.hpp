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

#ifndef ENVSEP_KEYVAL_HPP
#define ENVSEP_KEYVAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace envsep {

/// Plain-text key=value file support (mixture specs, sweep specs, run
/// manifests). Lines are `key=value`; blank lines and lines starting with
/// '#' are ignored; keys may repeat.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::string& path);

  /// Last value wins for scalar lookups.
  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key,
                           std::uint64_t fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Splits "a,b,c" into trimmed tokens; empty tokens are dropped.
std::vector<std::string> split_list(const std::string& csv, char sep = ',');

}  // namespace envsep

#endif  // ENVSEP_KEYVAL_HPP
