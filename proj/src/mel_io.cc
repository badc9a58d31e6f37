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

#include "emph/mel_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "emph/error.h"

namespace emph {
namespace {

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutF32(std::vector<uint8_t>& out, float f) { PutU32(out, std::bit_cast<uint32_t>(f)); }

uint32_t GetU32(const std::vector<uint8_t>& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw Error("mel file truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

std::vector<uint8_t> EncodeMel(const MelSpectrogram& mel) {
  std::vector<uint8_t> out = {'M', 'E', 'L', '0'};
  out.reserve(20 + 4 * (mel.magnitudes.size() + mel.f0_hz.size()));
  PutU32(out, static_cast<uint32_t>(mel.n_frames()));
  PutU32(out, static_cast<uint32_t>(mel.n_bins));
  PutU32(out, static_cast<uint32_t>(mel.frame_rate_hz));
  PutU32(out, static_cast<uint32_t>(mel.sample_rate));
  for (float v : mel.magnitudes) PutF32(out, v);
  for (float v : mel.f0_hz) PutF32(out, v);
  return out;
}

MelSpectrogram DecodeMel(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 20 || std::memcmp(bytes.data(), "MEL0", 4) != 0) {
    throw Error("not a mel file (bad magic)");
  }
  std::size_t pos = 4;
  const uint32_t n_frames = GetU32(bytes, pos);
  MelSpectrogram mel;
  mel.n_bins = static_cast<int>(GetU32(bytes, pos));
  mel.frame_rate_hz = static_cast<int>(GetU32(bytes, pos));
  mel.sample_rate = static_cast<int>(GetU32(bytes, pos));
  if (mel.n_bins <= 0) throw Error("mel file has no bins");
  const std::size_t cells = static_cast<std::size_t>(n_frames) * mel.n_bins;
  if (bytes.size() != 20 + 4 * (cells + n_frames)) {
    throw Error("mel file size does not match its header");
  }
  mel.magnitudes.resize(cells);
  for (auto& v : mel.magnitudes) v = std::bit_cast<float>(GetU32(bytes, pos));
  mel.f0_hz.resize(n_frames);
  for (auto& v : mel.f0_hz) v = std::bit_cast<float>(GetU32(bytes, pos));
  for (float v : mel.magnitudes) {
    if (!std::isfinite(v) || v < 0.0f) throw Error("mel file holds a negative or non-finite magnitude");
  }
  return mel;
}

void WriteMelFile(const std::string& path, const MelSpectrogram& mel) {
  const auto bytes = EncodeMel(mel);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

MelSpectrogram ReadMelFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodeMel(bytes);
}

}  // namespace emph
