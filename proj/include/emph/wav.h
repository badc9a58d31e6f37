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

#ifndef EMPH_WAV_H_
#define EMPH_WAV_H_

#include <cstdint>
#include <string>
#include <vector>

#include "emph/vocoder.h"

namespace emph {

// Float to 16-bit PCM: x * 32767 rounded half away from zero, saturated.
int16_t FloatToPcm16(float x);

// RIFF/WAVE, mono, 16-bit PCM, little-endian.
std::vector<uint8_t> EncodeWav(const Waveform& w);
Waveform DecodeWav(const std::vector<uint8_t>& bytes);

void WriteWavFile(const std::string& path, const Waveform& w);
Waveform ReadWavFile(const std::string& path);

}  // namespace emph

#endif  // EMPH_WAV_H_
