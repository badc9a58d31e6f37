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

#ifndef EMPH_VOCODER_H_
#define EMPH_VOCODER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "emph/acoustics.h"
#include "emph/duration.h"
#include "emph/phonology.h"

namespace emph {

// Samples per mel frame at 24 kHz for 80 Hz frames.
inline constexpr int kNominalHop = 300;
inline constexpr double kMelEmphStretch = 1.25;

struct FrameHops {
  std::vector<int> hops;
  std::size_t size() const { return hops.size(); }
  long long total() const;
};

// 300 everywhere, ceil(300 * alpha_mel) inside `range`.
FrameHops MakeHops(std::size_t n_frames, std::optional<FrameRange> range,
                   double alpha_mel = kMelEmphStretch);

struct Waveform {
  std::vector<float> samples;
  int sample_rate = kSampleRate;
  // Set when the peak exceeded full scale and the output was rescaled.
  bool peak_normalized = false;
  double normalization_gain = 1.0;
};

struct VocoderConfig {
  uint32_t noise_seed = 0x5EED2024u;
  double output_gain = 0.1;
};

inline constexpr int kImpulseResponseLength = 1200;
inline constexpr double kPeakTarget = 0.89;

// Zero-phase impulse response for one mel row: the envelope is mapped back
// to a linear frequency grid and inverse transformed, then Hann windowed.
std::vector<float> EnvelopeImpulseResponse(std::span<const float> mel_row);

// Excitation plus envelope overlap-add. Output length is the sum of hops
// plus one nominal hop of tail. Frames whose magnitude row is entirely zero
// produce digital silence over their hop.
Waveform Vocode(const MelSpectrogram& mel, const FrameHops& hops,
                const VocoderConfig& config = {});

struct MelEmphSettings {
  double v_mel = kMelEmphGain;
  double alpha_mel = kMelEmphStretch;
};

// Louder and slower rendering of one word by editing the mel and the hop
// sizes before vocoding. Without a word this is plain Vocode. The hops used
// are written to `hops_out` when given.
Waveform MelEmph(const MelSpectrogram& mel, const Utterance& utt,
                 const DurationSequence& durations,
                 std::optional<std::size_t> word_index,
                 const MelEmphSettings& settings = {},
                 const VocoderConfig& config = {}, FrameHops* hops_out = nullptr);

}  // namespace emph

#endif  // EMPH_VOCODER_H_
