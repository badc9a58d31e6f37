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

#include "emph/acoustics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

#include "emph/error.h"
#include "emph/simd/kernels.h"

namespace emph {
namespace {

struct Formants {
  std::string_view symbol;
  double f1, f2, f3;
};

constexpr std::array<Formants, 17> kVowelFormants = {{
    {"AA", 730, 1090, 2440}, {"AE", 660, 1720, 2410}, {"AH", 520, 1190, 2390},
    {"AO", 570, 840, 2410},  {"AW", 680, 1300, 2400}, {"AX", 500, 1500, 2500},
    {"AY", 660, 1500, 2450}, {"EH", 530, 1840, 2480}, {"ER", 490, 1350, 1690},
    {"EY", 480, 2000, 2600}, {"IH", 390, 1990, 2550}, {"IX", 420, 1800, 2550},
    {"IY", 270, 2290, 3010}, {"OW", 500, 900, 2400},  {"OY", 550, 1000, 2450},
    {"UH", 440, 1020, 2240}, {"UW", 300, 870, 2240},
}};

double Bump(double f, double center, double sigma) {
  const double z = (f - center) / sigma;
  return std::exp(-0.5 * z * z);
}

double HighPass(double f, double cutoff, double width) {
  return 1.0 / (1.0 + std::exp(-(f - cutoff) / width));
}

double ResonanceEnvelope(double f, double f1, double f2, double f3, double a1,
                         double a2, double a3) {
  return a1 * Bump(f, f1, 90.0) + a2 * Bump(f, f2, 120.0) +
         a3 * Bump(f, f3, 160.0);
}

double TemplateValue(std::string_view s, PhonemeClass cls, double f) {
  // Gentle spectral tilt shared by every voiced sound.
  const double tilt = 1.0 / (1.0 + f / 3000.0);
  switch (cls) {
    case PhonemeClass::kPause:
      return 0.0;
    case PhonemeClass::kVowel:
      for (const Formants& v : kVowelFormants) {
        if (v.symbol == s) {
          return 0.03 * tilt + ResonanceEnvelope(f, v.f1, v.f2, v.f3, 1.0, 0.6, 0.3) * tilt;
        }
      }
      return 0.0;
    case PhonemeClass::kNasal: {
      const double f2 = s == "M" ? 1100.0 : s == "N" ? 1700.0 : 2000.0;
      return 0.02 * tilt + ResonanceEnvelope(f, 250.0, f2, 2500.0, 0.7, 0.12, 0.08) * tilt;
    }
    case PhonemeClass::kLiquid:
      if (s == "L") return 0.02 * tilt + ResonanceEnvelope(f, 360, 1300, 2700, 0.7, 0.3, 0.2) * tilt;
      return 0.02 * tilt + ResonanceEnvelope(f, 420, 1300, 1600, 0.7, 0.35, 0.25) * tilt;
    case PhonemeClass::kGlide:
      if (s == "W") return 0.02 * tilt + ResonanceEnvelope(f, 300, 610, 2200, 0.7, 0.4, 0.15) * tilt;
      return 0.02 * tilt + ResonanceEnvelope(f, 280, 2200, 2900, 0.7, 0.4, 0.2) * tilt;
    case PhonemeClass::kFricative: {
      const bool voiced = s == "V" || s == "DH" || s == "Z" || s == "ZH";
      const double bar = voiced ? 0.25 * Bump(f, 180.0, 120.0) : 0.0;
      if (s == "S" || s == "Z") return bar + 0.45 * HighPass(f, 4500.0, 500.0);
      if (s == "SH" || s == "ZH") return bar + 0.45 * HighPass(f, 2500.0, 400.0);
      if (s == "HH") return 0.25 * ResonanceEnvelope(f, 500, 1500, 2500, 1.0, 0.6, 0.4);
      return bar + 0.15 * HighPass(f, 1200.0, 600.0);
    }
    case PhonemeClass::kStop: {
      const bool voiced = s == "B" || s == "D" || s == "G";
      const double center = (s == "P" || s == "B") ? 900.0 : (s == "T" || s == "D") ? 4000.0 : 2000.0;
      const double bar = voiced ? 0.2 * Bump(f, 150.0, 100.0) : 0.0;
      return bar + 0.08 + 0.2 * Bump(f, center, 800.0);
    }
    case PhonemeClass::kAffricate: {
      const double bar = s == "JH" ? 0.2 * Bump(f, 180.0, 120.0) : 0.0;
      return bar + 0.05 + 0.4 * HighPass(f, 2600.0, 400.0);
    }
  }
  return 0.0;
}

struct TemplateBank {
  std::array<double, kMelBins> centers{};
  std::vector<std::array<float, kMelBins>> rows;

  TemplateBank() {
    const double mel_max = HzToMel(kSampleRate / 2.0);
    for (int k = 0; k < kMelBins; ++k) {
      centers[k] = MelToHz(mel_max * (k + 0.5) / kMelBins);
    }
    const auto inventory = Inventory();
    rows.resize(inventory.size());
    for (std::size_t id = 0; id < inventory.size(); ++id) {
      for (int k = 0; k < kMelBins; ++k) {
        rows[id][k] = static_cast<float>(
            TemplateValue(inventory[id].symbol, inventory[id].phoneme_class, centers[k]));
      }
    }
  }
};

const TemplateBank& Bank() {
  static const TemplateBank bank;
  return bank;
}

}  // namespace

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::span<const double> MelBinCenters() { return Bank().centers; }

std::span<const float> SpectralTemplate(uint8_t symbol_id) {
  return Bank().rows.at(symbol_id);
}

long long ProsodyPlan::InjectedSilenceFrames() const {
  return std::count_if(frames.begin(), frames.end(),
                       [](const PlanFrame& f) { return f.inserted_silence; });
}

ProsodyPlan PlanProsody(const Utterance& utt, const DurationSequence& durations,
                        const DurationSequence& predicted, Profile profile,
                        const PhonemeFlags* flags, const ProsodyConfig& config) {
  ValidateDurations(durations, utt.size());
  ValidateDurations(predicted, utt.size());
  if (flags != nullptr && flags->size() != utt.size()) {
    throw Error("flag length " + std::to_string(flags->size()) +
                " does not match " + std::to_string(utt.size()) + " phonemes");
  }

  const auto& words = utt.words();
  std::vector<bool> inject(words.size(), false);
  for (std::size_t w = 0; w < words.size(); ++w) {
    const Word& word = words[w];
    if (word.is_pause || !word.stressed_vowel) continue;
    if (flags != nullptr) {
      for (std::size_t p = word.begin; p < word.end; ++p) {
        if (flags->flags[p]) inject[w] = true;
      }
    }
    if (profile == Profile::kExpressive) {
      long long provided = 0, expected = 0;
      for (std::size_t p = word.begin; p < word.end; ++p) {
        provided += durations.frames[p];
        expected += predicted.frames[p];
      }
      const double ratio = static_cast<double>(provided) / static_cast<double>(expected);
      if (ratio >= config.lengthening_threshold - 1e-12) inject[w] = true;
    }
  }

  ProsodyPlan plan;
  plan.profile = profile;
  const int silence = config.pre_stress_silence_frames;
  for (std::size_t p = 0; p < utt.size(); ++p) {
    const Word& word = words[utt.WordOf(p)];
    if (inject[utt.WordOf(p)] && word.stressed_vowel == p) {
      for (int s = 0; s < silence; ++s) plan.frames.push_back({p, 0.0f, 0.0f, true});
    }
    const Phoneme& ph = utt.phonemes()[p];
    const float gain = ph.is_pause() ? 0.0f : 1.0f;
    for (int f = 0; f < durations.frames[p]; ++f) plan.frames.push_back({p, 0.0f, gain, false});
  }

  const std::size_t n = plan.frames.size();
  auto baseline = [&](std::size_t t) {
    if (n <= 1) return config.f0_start_hz;
    return config.f0_start_hz +
           (config.f0_end_hz - config.f0_start_hz) * static_cast<double>(t) /
               static_cast<double>(n - 1);
  };
  for (std::size_t t = 0; t < n; ++t) {
    PlanFrame& frame = plan.frames[t];
    if (!frame.inserted_silence && utt.phonemes()[frame.phoneme].voiced()) {
      frame.f0_hz = static_cast<float>(baseline(t));
    }
  }

  // Pitch accent over each injected stressed vowel: starts high, falls
  // linearly to the low target, then stays flat.
  std::size_t t = 0;
  while (t < n) {
    const PlanFrame& frame = plan.frames[t];
    const std::size_t w = utt.WordOf(frame.phoneme);
    if (frame.inserted_silence || !inject[w] || words[w].stressed_vowel != frame.phoneme) {
      ++t;
      continue;
    }
    const std::size_t onset = t;
    std::size_t end = t;
    while (end < n && plan.frames[end].phoneme == frame.phoneme) ++end;
    const double local = baseline(onset);
    const double peak = config.peak_ratio * local;
    const double low = config.low_ratio * local;
    const double len = static_cast<double>(end - onset);
    for (std::size_t k = onset; k < end; ++k) {
      const double u = static_cast<double>(k - onset) / (config.low_position * len);
      plan.frames[k].f0_hz = static_cast<float>(peak + (low - peak) * std::min(1.0, u));
    }
    plan.correlates.push_back({w, silence, peak, low});
    t = end;
  }
  return plan;
}

MelSpectrogram RenderMel(const ProsodyPlan& plan, const Utterance& utt) {
  MelSpectrogram mel;
  const std::size_t n = plan.size();
  mel.magnitudes.assign(n * kMelBins, 0.0f);
  mel.f0_hz.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PlanFrame& f = plan.frames[i];
    if (f.phoneme >= utt.size()) throw Error("plan frame points past the utterance");
    mel.f0_hz[i] = f.f0_hz;
  }

  // Segments are maximal runs of frames realizing the same unit.
  struct Segment {
    std::size_t begin, end;
    const float* row;  // nullptr for silence
  };
  static const std::array<float, kMelBins> kZero{};
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && plan.frames[j].phoneme == plan.frames[i].phoneme &&
           plan.frames[j].inserted_silence == plan.frames[i].inserted_silence) {
      ++j;
    }
    const float* row = plan.frames[i].inserted_silence
                           ? kZero.data()
                           : SpectralTemplate(utt.phonemes()[plan.frames[i].phoneme].id()).data();
    segments.push_back({i, j, row});
    i = j;
  }

  constexpr double kNeighbor = 1.0 / 3.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const Segment& seg = segments[s];
    for (std::size_t i = seg.begin; i < seg.end; ++i) {
      const double gain = plan.frames[i].energy_gain;
      if (gain == 0.0) continue;
      const float* prev = (i == seg.begin && s > 0) ? segments[s - 1].row : nullptr;
      const float* next = (i + 1 == seg.end && s + 1 < segments.size()) ? segments[s + 1].row : nullptr;
      const double w_prev = prev ? kNeighbor : 0.0;
      const double w_next = next ? kNeighbor : 0.0;
      const double w_self = 1.0 - w_prev - w_next;
      auto out = mel.row(i);
      for (int k = 0; k < kMelBins; ++k) {
        double v = w_self * seg.row[k];
        if (prev) v += w_prev * prev[k];
        if (next) v += w_next * next[k];
        out[k] = static_cast<float>(gain * v);
      }
    }
  }
  return mel;
}

FrameRange FramesForWord(const Utterance& utt, const DurationSequence& d,
                         std::size_t word_index) {
  if (word_index >= utt.words().size()) {
    throw Error("word index " + std::to_string(word_index) + " out of range for " +
                std::to_string(utt.words().size()) + " words");
  }
  ValidateDurations(d, utt.size());
  const Word& word = utt.words()[word_index];
  std::size_t begin = 0;
  for (std::size_t p = 0; p < word.begin; ++p) begin += d.frames[p];
  std::size_t end = begin;
  for (std::size_t p = word.begin; p < word.end; ++p) end += d.frames[p];
  return {begin, end};
}

MelSpectrogram ApplyMelEmphGain(const MelSpectrogram& mel, FrameRange range,
                                double v_mel) {
  if (range.begin > range.end || range.end > mel.n_frames()) {
    throw Error("frame range [" + std::to_string(range.begin) + ", " +
                std::to_string(range.end) + ") outside " +
                std::to_string(mel.n_frames()) + " frames");
  }
  if (!(v_mel > 0.0)) throw Error("mel gain must be positive");
  MelSpectrogram out = mel;
  std::span<float> block(out.magnitudes.data() + range.begin * mel.n_bins,
                         range.size() * mel.n_bins);
  simd::Scale(block, v_mel);
  return out;
}

}  // namespace emph
