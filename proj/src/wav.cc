// src/wav.cc

// Copyright 2026 The ssdscreen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "ssd/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ssd/error.h"

namespace ssd {

namespace {

std::uint32_t ReadU32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string *out, std::uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

void AudioBuffer::Validate() const {
  if (sample_rate <= 0) throw ValidationError("sample_rate must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double s = samples[i];
    if (!std::isfinite(s))
      throw ValidationError("non-finite audio sample at index " + std::to_string(i));
    if (std::abs(s) > 1.0)
      throw ValidationError("audio sample outside [-1, 1] at index " + std::to_string(i));
  }
}

AudioBuffer LoadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError(path + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    std::uint32_t size = ReadU32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || avail < 16) throw FormatError(path + ": truncated fmt chunk");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min<std::size_t>(size, avail);
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) throw FormatError(path + ": missing fmt chunk");
  if (format != 1)
    throw UnsupportedEncodingError(path + ": unsupported encoding: format tag " +
                                   std::to_string(format) + " (only PCM is accepted)");
  if (channels != 1)
    throw UnsupportedEncodingError(path + ": unsupported encoding: " +
                                   std::to_string(channels) +
                                   " channels (only mono is accepted)");
  if (bits != 16)
    throw UnsupportedEncodingError(path + ": unsupported encoding: " +
                                   std::to_string(bits) +
                                   " bits per sample (only 16-bit is accepted)");
  if (rate == 0) throw FormatError(path + ": zero sample rate");
  if (data == nullptr) throw FormatError(path + ": missing data chunk");

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(rate);
  std::size_t n = data_size / 2;
  audio.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = static_cast<std::int16_t>(ReadU16(data + 2 * i));
    audio.samples[i] = v / 32768.0;
  }
  return audio;
}

void WriteWav(const std::string &path, const AudioBuffer &audio) {
  std::string out;
  auto n = static_cast<std::uint32_t>(audio.samples.size());
  out.append("RIFF");
  PutU32(&out, 36 + 2 * n);
  out.append("WAVEfmt ");
  PutU32(&out, 16);
  PutU16(&out, 1);
  PutU16(&out, 1);
  PutU32(&out, static_cast<std::uint32_t>(audio.sample_rate));
  PutU32(&out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  out.append("data");
  PutU32(&out, 2 * n);
  for (double s : audio.samples) {
    double v = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    v = std::clamp(v, -32768.0, 32767.0);
    PutU16(&out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write wav file: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path);
}

AudioBuffer ConcatAudio(std::span<const AudioBuffer> parts) {
  if (parts.empty()) throw ValidationError("ConcatAudio: no parts");
  AudioBuffer out;
  out.sample_rate = parts.front().sample_rate;
  for (const auto &p : parts) {
    if (p.sample_rate != out.sample_rate)
      throw ValidationError("ConcatAudio: mismatched sample rates (" +
                            std::to_string(p.sample_rate) + " vs " +
                            std::to_string(out.sample_rate) + ")");
    out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
  }
  return out;
}

}  // namespace ssd
