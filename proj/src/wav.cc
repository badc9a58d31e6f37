// Copyright 2026 The Emph Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emph/wav.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "emph/error.h"

namespace emph {
namespace {

void Put(std::vector<uint8_t>& out, uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t Get(const std::vector<uint8_t>& in, std::size_t pos, int bytes) {
  if (pos + bytes > in.size()) throw Error("WAV data truncated");
  uint32_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<uint32_t>(in[pos + i]) << (8 * i);
  return v;
}

}  // namespace

int16_t FloatToPcm16(float x) {
  const double scaled = static_cast<double>(x) * 32767.0;
  const double rounded = scaled < 0.0 ? -std::floor(-scaled + 0.5) : std::floor(scaled + 0.5);
  if (!(rounded > -32768.0)) return -32768;  // also catches NaN
  if (rounded > 32767.0) return 32767;
  return static_cast<int16_t>(rounded);
}

std::vector<uint8_t> EncodeWav(const Waveform& w) {
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  Put(out, 36 + data_bytes, 4);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  Put(out, 16, 4);
  Put(out, 1, 2);  // PCM
  Put(out, 1, 2);  // mono
  Put(out, static_cast<uint32_t>(w.sample_rate), 4);
  Put(out, static_cast<uint32_t>(w.sample_rate) * 2, 4);
  Put(out, 2, 2);
  Put(out, 16, 2);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  Put(out, data_bytes, 4);
  for (float x : w.samples) Put(out, static_cast<uint16_t>(FloatToPcm16(x)), 2);
  return out;
}

Waveform DecodeWav(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error("not a RIFF/WAVE file");
  }
  Waveform w;
  bool have_format = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t size = Get(bytes, pos + 4, 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (Get(bytes, body, 2) != 1 || Get(bytes, body + 2, 2) != 1 ||
          Get(bytes, body + 14, 2) != 16) {
        throw Error("only mono 16-bit PCM WAV is supported");
      }
      w.sample_rate = static_cast<int>(Get(bytes, body + 4, 4));
      have_format = true;
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      if (!have_format) throw Error("WAV data chunk before fmt chunk");
      if (body + size > bytes.size()) throw Error("WAV data truncated");
      w.samples.resize(size / 2);
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const auto v = static_cast<int16_t>(Get(bytes, body + 2 * i, 2));
        w.samples[i] = static_cast<float>(v) / 32767.0f;
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw Error("WAV file has no data chunk");
}

void WriteWavFile(const std::string& path, const Waveform& w) {
  const auto bytes = EncodeWav(w);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

Waveform ReadWavFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodeWav(bytes);
}

}  // namespace emph
