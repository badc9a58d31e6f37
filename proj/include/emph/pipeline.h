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

#ifndef EMPH_PIPELINE_H_
#define EMPH_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emph/acoustics.h"
#include "emph/analysis.h"
#include "emph/duration.h"
#include "emph/phonology.h"
#include "emph/vocoder.h"

namespace emph {

enum class EmphasisMode { kNone, kDd, kMel, kFlag };

std::string_view ModeName(EmphasisMode mode);
EmphasisMode ParseMode(std::string_view name);
std::string_view ProfileName(Profile profile);
Profile ParseProfile(std::string_view name);

inline constexpr double kDefaultAlphaDd = 1.5;
// Reduced lengthening used for voices with a neutral speaking style.
inline constexpr double kNeutralAlphaDd = 1.25;

struct RunConfig {
  EmphasisMode mode = EmphasisMode::kNone;
  // Unset means the profile default: 1.5 expressive, 1.25 neutral.
  std::optional<double> alpha_dd;
  double alpha_mel = kMelEmphStretch;
  double v_mel = kMelEmphGain;
  Profile profile = Profile::kExpressive;
  uint32_t seed = VocoderConfig{}.noise_seed;
  ProsodyConfig prosody;

  double ResolvedAlphaDd() const;
  // Throws emph::Error for out-of-range constants.
  void Validate() const;
};

// Fields present in the JSON object override `base`.
RunConfig ParseRunConfig(std::string_view json_text, RunConfig base = {});

struct SynthesisResult {
  DurationSequence reference;  // durations before any emphasis edit
  DurationSequence durations;  // durations driving the acoustic model
  ProsodyPlan plan;
  MelSpectrogram mel;          // the mel that was vocoded
  FrameHops hops;
  Waveform waveform;
  Alignment alignment;
};

// Runs duration prediction (or takes `oracle` durations), the emphasis
// mode, prosody planning, mel rendering and vocoding. Deterministic.
SynthesisResult Synthesize(const Utterance& utt, const RunConfig& config,
                           const DurationModel& model = {},
                           const DurationSequence* oracle = nullptr);

// Word sample intervals from the frame-to-phoneme map and hop sizes.
Alignment BuildAlignment(const Utterance& utt, const ProsodyPlan& plan,
                         const FrameHops& hops);

std::string SerializeCorrelates(const ProsodyPlan& plan);

struct ModeOutcome {
  EmphasisMode mode = EmphasisMode::kNone;
  std::size_t utterances = 0;
  std::size_t correct = 0;
  std::size_t undetected = 0;
  // Correct answers counting the tie-break guess for undetected cases.
  double tie_break_accuracy = 0.0;
  double accuracy = 0.0;
  double mean_target_duration_ratio = 0.0;
  double injected_fraction = 0.0;
  double mean_pre_stress_silence_ms = 0.0;
};

struct ExperimentSummary {
  std::vector<ModeOutcome> modes;
  // Expected accuracy of a uniform guess over content words.
  double chance = 0.0;
};

// Renders each utterance in every mode and asks the machine listener which
// word is emphasized, with the unemphasized rendering as reference.
ExperimentSummary RunExperiment(
    const std::vector<std::pair<std::string, Utterance>>& corpus,
    const std::vector<EmphasisMode>& modes, const RunConfig& config,
    const DurationModel& model = {});

std::string SerializeExperiment(const ExperimentSummary& summary);

}  // namespace emph

#endif  // EMPH_PIPELINE_H_
