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

#include "envsep/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace envsep {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

double decode_sample(const unsigned char* p, std::uint16_t format,
                     std::uint16_t bits) {
  if (format == kFormatFloat) {
    float f;
    std::memcpy(&f, p, 4);
    return static_cast<double>(f);
  }
  if (bits == 16) {
    auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
    return static_cast<double>(v) / 32768.0;
  }
  // 24-bit little endian, sign-extended
  std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
  if (v & 0x800000) v |= ~0xFFFFFF;
  return static_cast<double>(v) / 8388608.0;
}

}  // namespace

void AudioSignal::validate() const {
  if (!(sample_rate > 0.0))
    throw std::invalid_argument("audio: sample rate must be positive");
  for (double v : samples)
    if (!std::isfinite(v))
      throw std::invalid_argument("audio: non-finite sample");
}

AudioSignal read_wav(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("wav: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  if (data.size() < 12 || std::memcmp(bytes, "RIFF", 4) != 0 ||
      std::memcmp(bytes + 8, "WAVE", 4) != 0)
    throw std::runtime_error("wav: not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* payload = nullptr;
  std::size_t payload_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = data.data() + pos;
    std::uint32_t chunk_size = read_u32(bytes + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > data.size())
      chunk_size = static_cast<std::uint32_t>(data.size() - body);
    if (std::memcmp(id, "fmt ", 4) == 0 && chunk_size >= 16) {
      format = read_u16(bytes + body);
      channels = read_u16(bytes + body + 2);
      rate = read_u32(bytes + body + 4);
      bits = read_u16(bytes + body + 14);
      if (format == kFormatExtensible && chunk_size >= 26)
        format = read_u16(bytes + body + 24);  // first two bytes of SubFormat
    } else if (std::memcmp(id, "data", 4) == 0) {
      payload = bytes + body;
      payload_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!payload) throw std::runtime_error("wav: missing data chunk: " + path);
  if (channels == 0 || rate == 0)
    throw std::runtime_error("wav: missing or bad fmt chunk: " + path);
  const bool ok = (format == kFormatPcm && (bits == 16 || bits == 24)) ||
                  (format == kFormatFloat && bits == 32);
  if (!ok)
    throw std::runtime_error("wav: unsupported format in " + path +
                             " (need PCM 16/24-bit or float 32-bit)");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t stride = bytes_per_sample * channels;
  const std::size_t frames = payload_size / stride;
  if (channels > 1)
    std::cerr << "wav: " << path << " has " << channels
              << " channels, downmixing by averaging\n";

  AudioSignal signal;
  signal.sample_rate = static_cast<double>(rate);
  signal.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c)
      acc += decode_sample(payload + i * stride + c * bytes_per_sample, format,
                           bits);
    signal.samples[i] = acc / channels;
  }
  return signal;
}

void write_wav(const std::string& path, const AudioSignal& signal,
               WavFormat format) {
  signal.validate();
  const std::uint16_t bits = format == WavFormat::pcm16     ? 16
                             : format == WavFormat::pcm24   ? 24
                                                            : 32;
  const std::uint16_t code =
      format == WavFormat::float32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t rate =
      static_cast<std::uint32_t>(std::lround(signal.sample_rate));
  const std::size_t n = signal.samples.size();
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(n * (bits / 8));

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, code);
  put_u16(out, 1);  // mono
  put_u32(out, rate);
  put_u32(out, rate * (bits / 8));
  put_u16(out, static_cast<std::uint16_t>(bits / 8));
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_size);

  for (double v : signal.samples) {
    if (format == WavFormat::float32) {
      float f = static_cast<float>(v);
      char buf[4];
      std::memcpy(buf, &f, 4);
      out.append(buf, 4);
    } else {
      double clipped = std::clamp(v, -1.0, 1.0);
      if (format == WavFormat::pcm16) {
        auto q = static_cast<std::int32_t>(std::lround(clipped * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(q & 0xFFFF));
      } else {
        auto q = static_cast<std::int32_t>(std::lround(clipped * 8388607.0));
        out.push_back(static_cast<char>(q & 0xFF));
        out.push_back(static_cast<char>((q >> 8) & 0xFF));
        out.push_back(static_cast<char>((q >> 16) & 0xFF));
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("wav: cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("wav: short write to " + path);
}

}  // namespace envsep
