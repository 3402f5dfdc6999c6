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

#include "envsep/keyval.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace envsep {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("keyval: malformed line '" + t + "'");
    kv.entries_.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("keyval: cannot open " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse(buffer.str());
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  std::optional<std::string> value;
  for (const auto& [k, v] : entries_)
    if (k == key) value = v;
  return value;
}

std::vector<std::string> KeyValues::get_all(const std::string& key) const {
  std::vector<std::string> values;
  for (const auto& [k, v] : entries_)
    if (k == key) values.push_back(v);
  return values;
}

std::string KeyValues::get_string(const std::string& key,
                                  const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? std::stod(*v) : fallback;
}

int KeyValues::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  return v ? std::stoi(*v) : fallback;
}

std::uint64_t KeyValues::get_uint64(const std::string& key,
                                    std::uint64_t fallback) const {
  const auto v = get(key);
  return v ? std::stoull(*v) : fallback;
}

std::vector<std::string> split_list(const std::string& csv, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream stream(csv);
  while (std::getline(stream, token, sep)) {
    const std::string t = trim(token);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace envsep
