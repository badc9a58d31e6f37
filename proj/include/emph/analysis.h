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

#ifndef EMPH_ANALYSIS_H_
#define EMPH_ANALYSIS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emph/vocoder.h"

namespace emph {

struct AnalysisConfig {
  double f0_min_hz = 70.0;
  double f0_max_hz = 400.0;
  double pitch_hop_s = 0.010;
  double pitch_window_s = 0.040;
  double voicing_threshold = 0.45;
  double energy_gate_db = -50.0;
  // Path costs over runs of voiced frames: a per-octave bonus for higher
  // candidates and a per-octave penalty for jumps between frames.
  double octave_cost = 0.01;
  double octave_jump_cost = 0.35;
  // Candidates per frame, strongest first.
  int max_candidates = 6;
  // Cutoff of the low-pass applied before correlation; 0 disables it.
  double pitch_lowpass_hz = 5000.0;
  int pitch_lowpass_taps = 97;
  double intensity_hop_s = 0.005;
  double intensity_window_s = 0.010;
  // Word-level intensity statistics use a longer window so that a few
  // pitch periods average out.
  double level_window_s = 0.032;
  double silence_threshold_db = -50.0;
  double silence_min_ms = 25.0;
  // How far before the stressed-vowel onset a silence may end and still
  // count as preceding it.
  double pre_stress_reach_ms = 50.0;
};

struct F0Frame {
  double time_s = 0.0;
  std::optional<double> f0_hz;
  double correlation = 0.0;
};

struct F0Track {
  double hop_s = 0.0;
  std::vector<F0Frame> frames;
};

// Frame k covers [k * hop, (k + 1) * hop) and is analysed over a window
// centred on that span. Voicing is decided per frame; among voiced frames
// the lag is chosen by a best path through the correlation peaks.
F0Track EstimateF0(const Waveform& w, const AnalysisConfig& config = {});

inline constexpr double kIntensityFloorDb = -90.0;

struct IntensityTrack {
  double hop_s = 0.0;
  // dBFS; a full-scale square wave reads 0.
  std::vector<double> db;
};

IntensityTrack Intensity(const Waveform& w, const AnalysisConfig& config = {});

struct TimeSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  double duration_ms() const { return (end_s - start_s) * 1000.0; }
};

// Maximal runs of frames below threshold lasting at least min_ms.
std::vector<TimeSegment> DetectSilences(const IntensityTrack& track,
                                        double threshold_db = -50.0,
                                        double min_ms = 25.0);

struct WordAlignment {
  std::size_t word_index = 0;
  std::string orthography;
  long long start_sample = 0;
  long long end_sample = 0;
  std::optional<long long> stressed_vowel_sample;
  bool is_pause = false;
};

struct Alignment {
  int sample_rate = kSampleRate;
  std::vector<WordAlignment> words;
};

std::string SerializeAlignment(const Alignment& a);
Alignment ParseAlignment(std::string_view json_text);

struct WordAcousticReport {
  std::size_t word_index = 0;
  std::string orthography;
  bool is_pause = false;
  double duration_ms = 0.0;
  std::optional<double> f0_mean_hz;
  std::optional<double> f0_min_hz;
  std::optional<double> f0_max_hz;
  double f0_range_hz = 0.0;
  double intensity_mean_db = kIntensityFloorDb;
  double intensity_max_db = kIntensityFloorDb;
  double pre_stress_silence_ms = 0.0;
};

std::vector<WordAcousticReport> WordReport(const Waveform& w, const Alignment& alignment,
                                           const AnalysisConfig& config = {});

std::string SerializeReports(const std::vector<WordAcousticReport>& reports);

struct EmphasisGuess {
  std::size_t word_index = 0;
  // False when every score is zero: nothing stood out.
  bool detected = false;
  std::vector<double> scores;
};

// Scores each non-pause word by the sum of z-scored differences against the
// baseline rendering (duration ratio, pitch range, pre-stress silence, peak
// intensity) and returns the best one, lowest index on ties.
EmphasisGuess IdentifyEmphasis(const std::vector<WordAcousticReport>& reports,
                               const std::vector<WordAcousticReport>& baseline);

}  // namespace emph

#endif  // EMPH_ANALYSIS_H_
