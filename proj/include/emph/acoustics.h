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

#ifndef EMPH_ACOUSTICS_H_
#define EMPH_ACOUSTICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "emph/duration.h"
#include "emph/phonology.h"

namespace emph {

enum class Profile { kNeutral, kExpressive };

// Emphasis correlates injected by the expressive profile and by flag
// conditioning: a pause before the stressed vowel and a high-to-low pitch
// accent on it.
struct ProsodyConfig {
  // Words whose frames reach this multiple of the predicted frames count as
  // lengthened.
  double lengthening_threshold = 1.2;
  int pre_stress_silence_frames = 3;
  double peak_ratio = 1.20;
  double low_ratio = 0.85;
  // Fraction of the vowel after which the contour stays at the low target.
  double low_position = 0.6;
  // Declination across the utterance on voiced frames.
  double f0_start_hz = 180.0;
  double f0_end_hz = 140.0;
};

struct PlanFrame {
  // Phoneme this frame realizes. Inserted silence points at the stressed
  // vowel it precedes.
  std::size_t phoneme = 0;
  float f0_hz = 0.0f;
  float energy_gain = 0.0f;
  bool inserted_silence = false;
};

struct CorrelateEvent {
  std::size_t word_index = 0;
  int pre_stress_silence_frames = 0;
  double pitch_peak_hz = 0.0;
  double pitch_low_hz = 0.0;
};

struct ProsodyPlan {
  std::vector<PlanFrame> frames;
  Profile profile = Profile::kNeutral;
  std::vector<CorrelateEvent> correlates;

  std::size_t size() const { return frames.size(); }
  long long InjectedSilenceFrames() const;
};

// Expands durations into per-frame prosody. `predicted` holds the duration
// model's own prediction for the utterance; the expressive profile compares
// each word against it. When `flags` is given the flagged word receives the
// correlates unconditionally.
ProsodyPlan PlanProsody(const Utterance& utt, const DurationSequence& durations,
                        const DurationSequence& predicted, Profile profile,
                        const PhonemeFlags* flags = nullptr,
                        const ProsodyConfig& config = {});

inline constexpr int kMelBins = 80;
inline constexpr int kSampleRate = 24000;

struct MelSpectrogram {
  int n_bins = kMelBins;
  int frame_rate_hz = kFrameRateHz;
  int sample_rate = kSampleRate;
  // Row-major n_frames x n_bins linear magnitudes.
  std::vector<float> magnitudes;
  std::vector<float> f0_hz;

  std::size_t n_frames() const { return f0_hz.size(); }
  std::span<float> row(std::size_t i) {
    return {magnitudes.data() + i * n_bins, static_cast<std::size_t>(n_bins)};
  }
  std::span<const float> row(std::size_t i) const {
    return {magnitudes.data() + i * n_bins, static_cast<std::size_t>(n_bins)};
  }
  friend bool operator==(const MelSpectrogram&, const MelSpectrogram&) = default;
};

// Center frequency in hertz of each mel bin, 0 to Nyquist of kSampleRate.
std::span<const double> MelBinCenters();
double HzToMel(double hz);
double MelToHz(double mel);

// Built-in spectral envelope of a symbol; all zero for pauses.
std::span<const float> SpectralTemplate(uint8_t symbol_id);

// Template rows scaled by the frame gain, with a linear cross-fade over the
// two frames that meet at every segment boundary.
MelSpectrogram RenderMel(const ProsodyPlan& plan, const Utterance& utt);

struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

// Frames of a word on the grid given by the durations alone.
FrameRange FramesForWord(const Utterance& utt, const DurationSequence& d,
                         std::size_t word_index);

inline constexpr double kMelEmphGain = 1.15;

// Multiplies the magnitudes of frames in `range` by v_mel. f0 untouched.
MelSpectrogram ApplyMelEmphGain(const MelSpectrogram& mel, FrameRange range,
                                double v_mel = kMelEmphGain);

}  // namespace emph

#endif  // EMPH_ACOUSTICS_H_
