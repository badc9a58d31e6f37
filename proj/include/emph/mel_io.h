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

#ifndef EMPH_MEL_IO_H_
#define EMPH_MEL_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "emph/acoustics.h"

namespace emph {

// Binary mel file, little-endian regardless of host:
//   "MEL0", u32 n_frames, u32 n_bins, u32 frame_rate_hz, u32 sample_rate,
//   n_frames * n_bins f32 magnitudes (row-major), n_frames f32 f0 values.
std::vector<uint8_t> EncodeMel(const MelSpectrogram& mel);
MelSpectrogram DecodeMel(const std::vector<uint8_t>& bytes);

void WriteMelFile(const std::string& path, const MelSpectrogram& mel);
MelSpectrogram ReadMelFile(const std::string& path);

}  // namespace emph

#endif  // EMPH_MEL_IO_H_
