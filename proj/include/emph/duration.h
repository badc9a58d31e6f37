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

#ifndef EMPH_DURATION_H_
#define EMPH_DURATION_H_

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emph/phonology.h"

namespace emph {

// Frames are 12.5 ms apart (80 Hz).
inline constexpr double kFramePeriodSeconds = 0.0125;
inline constexpr int kFrameRateHz = 80;

struct DurationSequence {
  std::vector<int> frames;

  std::size_t size() const { return frames.size(); }
  long long total() const;
  friend bool operator==(const DurationSequence&, const DurationSequence&) = default;
};

// Throws emph::Error when any entry is below one frame.
void ValidateDurations(const DurationSequence& d, std::size_t expected_size);

// JSON array of positive integers.
DurationSequence ParseDurations(std::string_view json_text);
std::string SerializeDurations(const DurationSequence& d);

struct DurationKey {
  uint8_t symbol_id;
  Stress stress;
  bool word_final;
  auto operator<=>(const DurationKey&) const = default;
};

// Mean frame count per (symbol, stress, word-final) with a per-class
// fallback for keys never observed.
class DurationModel {
 public:
  // Default fallbacks, empty table.
  DurationModel();
  DurationModel(std::map<DurationKey, double> table,
                std::array<double, kNumPhonemeClasses> fallback);

  const std::map<DurationKey, double>& table() const { return table_; }
  const std::array<double, kNumPhonemeClasses>& fallback() const { return fallback_; }

  // Mean for the phoneme at this position, before rounding.
  double Mean(const Utterance& utt, std::size_t phoneme) const;

  std::string ToJson() const;
  static DurationModel FromJson(std::string_view json_text);

  static std::array<double, kNumPhonemeClasses> DefaultFallback();

 private:
  std::map<DurationKey, double> table_;
  std::array<double, kNumPhonemeClasses> fallback_;
};

DurationKey KeyFor(const Utterance& utt, std::size_t phoneme);

// Arithmetic mean of observed frames per key. Classes seen in the corpus
// get their observed mean as fallback, others keep the defaults.
DurationModel FitDurationModel(
    std::span<const std::pair<Utterance, DurationSequence>> corpus);

// Round-half-up of the keyed mean, clamped to at least one frame.
DurationSequence PredictDurations(const DurationModel& model, const Utterance& utt);

inline constexpr double kMinDilation = 1.0;
inline constexpr double kMaxDilation = 1.5;

// Lengthens flagged phonemes to ceil(alpha * d). alpha must lie in
// [1.0, 1.5]; 1.0 is an explicit no-op.
DurationSequence Dilate(const DurationSequence& d, const PhonemeFlags& flags,
                        double alpha);

}  // namespace emph

#endif  // EMPH_DURATION_H_
