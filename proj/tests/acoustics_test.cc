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


#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "emph/acoustics.h"
#include "emph/corpus.h"
#include "emph/duration.h"
#include "emph/error.h"

namespace emph {
namespace {

DurationSequence Predicted(const Utterance& u) { return PredictDurations(DurationModel{}, u); }

long long WordFrames(const Utterance& u, const DurationSequence& d, std::size_t w) {
  long long sum = 0;
  for (std::size_t p = u.words()[w].begin; p < u.words()[w].end; ++p) sum += d.frames[p];
  return sum;
}

void ExpectPlanInvariants(const ProsodyPlan& plan, const Utterance& u, const DurationSequence& d) {
  EXPECT_EQ(static_cast<long long>(plan.size()), d.total() + plan.InjectedSilenceFrames());
  long long logged = 0;
  for (const CorrelateEvent& e : plan.correlates) logged += e.pre_stress_silence_frames;
  EXPECT_EQ(logged, plan.InjectedSilenceFrames());
  for (const PlanFrame& f : plan.frames) {
    const Phoneme& ph = u.phonemes()[f.phoneme];
    if (f.inserted_silence || !ph.voiced()) {
      EXPECT_EQ(f.f0_hz, 0.0f);
    }
    if (f.inserted_silence || ph.is_pause()) {
      EXPECT_EQ(f.energy_gain, 0.0f);
    } else {
      EXPECT_EQ(f.energy_gain, 1.0f);
    }
  }
}

TEST(PlanProsodyTest, NeutralUnmodifiedHasNoCorrelates) {
  const Utterance u = FixtureUtterance();
  const auto d = Predicted(u);
  const ProsodyPlan plan = PlanProsody(u, d, d, Profile::kNeutral);
  EXPECT_TRUE(plan.correlates.empty());
  EXPECT_EQ(static_cast<long long>(plan.size()), d.total());
  ExpectPlanInvariants(plan, u, d);
}

TEST(PlanProsodyTest, ExpressiveInjectsOnDilatedWord) {
  const Utterance u = FixtureUtterance();
  const auto predicted = Predicted(u);
  const auto dilated = Dilate(predicted, UpsampleFlags(u), 1.5);
  // Ratio recomputed here from the raw frame sums.
  const double ratio = static_cast<double>(WordFrames(u, dilated, 3)) /
                       static_cast<double>(WordFrames(u, predicted, 3));
  ASSERT_GE(ratio, 1.2);
  const ProsodyPlan plan = PlanProsody(u, dilated, predicted, Profile::kExpressive);
  ASSERT_EQ(plan.correlates.size(), 1u);
  EXPECT_EQ(plan.correlates[0].word_index, 3u);
  EXPECT_EQ(plan.correlates[0].pre_stress_silence_frames, 3);
  EXPECT_EQ(static_cast<long long>(plan.size()), dilated.total() + 3);
  ExpectPlanInvariants(plan, u, dilated);

  // The silence sits directly before the stressed vowel.
  const std::size_t vowel = *u.words()[3].stressed_vowel;
  std::size_t first_vowel_frame = 0;
  while (plan.frames[first_vowel_frame].phoneme != vowel || plan.frames[first_vowel_frame].inserted_silence) {
    ++first_vowel_frame;
  }
  for (std::size_t k = first_vowel_frame - 3; k < first_vowel_frame; ++k) {
    EXPECT_TRUE(plan.frames[k].inserted_silence);
    EXPECT_EQ(plan.frames[k].phoneme, vowel);
  }
  EXPECT_FALSE(plan.frames[first_vowel_frame - 4].inserted_silence);
}

TEST(PlanProsodyTest, ContourPeakThenFallThenFlat) {
  const Utterance u = FixtureUtterance();
  const auto predicted = Predicted(u);
  const auto dilated = Dilate(predicted, UpsampleFlags(u), 1.5);
  const ProsodyPlan plan = PlanProsody(u, dilated, predicted, Profile::kExpressive);
  const std::size_t vowel = *u.words()[3].stressed_vowel;
  std::vector<std::size_t> frames;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    if (plan.frames[k].phoneme == vowel && !plan.frames[k].inserted_silence) frames.push_back(k);
  }
  ASSERT_GE(frames.size(), 5u);
  const std::size_t n = plan.size();
  const double local = 180.0 + (140.0 - 180.0) * static_cast<double>(frames[0]) / static_cast<double>(n - 1);
  const CorrelateEvent& e = plan.correlates[0];
  EXPECT_NEAR(e.pitch_peak_hz, 1.2 * local, 1e-9);
  EXPECT_NEAR(e.pitch_low_hz, 0.85 * local, 1e-9);
  EXPECT_FLOAT_EQ(plan.frames[frames[0]].f0_hz, static_cast<float>(1.2 * local));
  const double len = static_cast<double>(frames.size());
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const float f = plan.frames[frames[i]].f0_hz;
    if (static_cast<double>(i) / (0.6 * len) >= 1.0) {
      EXPECT_FLOAT_EQ(f, static_cast<float>(0.85 * local));
    } else {
      EXPECT_LT(f, plan.frames[frames[i - 1]].f0_hz);
    }
  }
}

TEST(PlanProsodyTest, FlagSimInjectsUnconditionally) {
  const Utterance u = FixtureUtterance().WithTarget(1);
  const auto d = Predicted(u);
  const PhonemeFlags flags = UpsampleFlags(u);
  for (Profile p : {Profile::kNeutral, Profile::kExpressive}) {
    const ProsodyPlan plan = PlanProsody(u, d, d, p, &flags);
    ASSERT_EQ(plan.correlates.size(), 1u);
    EXPECT_EQ(plan.correlates[0].word_index, 1u);
    ExpectPlanInvariants(plan, u, d);
  }
}

TEST(PlanProsodyTest, ThresholdBoundary) {
  // One word of 10 predicted frames; provided 12 is exactly 1.2.
  const Utterance u = ParseUtterance(R"({"words": [{"orthography": "a",
      "phonemes": [{"symbol": "M"}, {"symbol": "AA", "stress": "primary"}]}]})");
  const DurationSequence predicted{{5, 5}};
  const auto plan_at = PlanProsody(u, DurationSequence{{5, 7}}, predicted, Profile::kExpressive);
  EXPECT_EQ(plan_at.correlates.size(), 1u);
  ProsodyConfig c;
  c.lengthening_threshold = 1.2 + 1e-6;
  EXPECT_TRUE(PlanProsody(u, DurationSequence{{5, 7}}, predicted, Profile::kExpressive, nullptr, c)
                  .correlates.empty());
  EXPECT_TRUE(PlanProsody(u, DurationSequence{{5, 6}}, predicted, Profile::kExpressive).correlates.empty());
  EXPECT_TRUE(PlanProsody(u, DurationSequence{{5, 7}}, predicted, Profile::kNeutral).correlates.empty());
}

TEST(PlanProsodyTest, ThresholdPropertyOverRandomRatios) {
  const Utterance u = ParseUtterance(R"({"words": [{"orthography": "a",
      "phonemes": [{"symbol": "M"}, {"symbol": "AA", "stress": "primary"}, {"symbol": "N"}]}]})");
  std::mt19937 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    DurationSequence predicted{{1 + static_cast<int>(rng() % 12), 1 + static_cast<int>(rng() % 12),
                                1 + static_cast<int>(rng() % 12)}};
    DurationSequence provided = predicted;
    for (int& f : provided.frames) f += static_cast<int>(rng() % 8);
    const long long a = provided.total();
    const long long b = predicted.total();
    // 5a >= 6b is ratio >= 1.2 in integers.
    const bool expected = 5 * a >= 6 * b;
    const auto plan = PlanProsody(u, provided, predicted, Profile::kExpressive);
    EXPECT_EQ(!plan.correlates.empty(), expected) << a << "/" << b;
  }
}

TEST(PlanProsodyTest, LengthErrors) {
  const Utterance u = FixtureUtterance();
  const auto d = Predicted(u);
  EXPECT_THROW(PlanProsody(u, DurationSequence{{1, 2}}, d, Profile::kNeutral), Error);
  const PhonemeFlags bad{{1}};
  EXPECT_THROW(PlanProsody(u, d, d, Profile::kNeutral, &bad), Error);
}

TEST(PlanProsodyTest, ConservationOverRandomCorpus) {
  std::mt19937 rng(17);
  for (const auto& [id, u] : GenerateCorpus(60, 3)) {
    const auto predicted = Predicted(u);
    const double alpha = 1.0 + 0.5 * static_cast<double>(rng() % 1000) / 999.0;
    const auto d = Dilate(predicted, UpsampleFlags(u), alpha);
    for (Profile p : {Profile::kNeutral, Profile::kExpressive}) {
      const auto plan = PlanProsody(u, d, predicted, p);
      ExpectPlanInvariants(plan, u, d);
      const MelSpectrogram mel = RenderMel(plan, u);
      EXPECT_EQ(static_cast<long long>(mel.n_frames()), d.total() + plan.InjectedSilenceFrames()) << id;
    }
  }
}

TEST(RenderMelTest, ShapeSilenceAndDeterminism) {
  const Utterance u = FixtureUtterance();
  const auto predicted = Predicted(u);
  const auto dilated = Dilate(predicted, UpsampleFlags(u), 1.5);
  const auto plan = PlanProsody(u, dilated, predicted, Profile::kExpressive);
  const MelSpectrogram mel = RenderMel(plan, u);
  ASSERT_EQ(mel.n_frames(), plan.size());
  EXPECT_EQ(mel.magnitudes.size(), plan.size() * kMelBins);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    EXPECT_EQ(mel.f0_hz[i], plan.frames[i].f0_hz);
    const auto row = mel.row(i);
    for (float v : row) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0f);
    }
    if (plan.frames[i].inserted_silence || u.phonemes()[plan.frames[i].phoneme].is_pause()) {
      EXPECT_TRUE(std::all_of(row.begin(), row.end(), [](float v) { return v == 0.0f; }));
    }
  }
  const MelSpectrogram again = RenderMel(plan, u);
  EXPECT_EQ(0, std::memcmp(mel.magnitudes.data(), again.magnitudes.data(), mel.magnitudes.size() * sizeof(float)));
}

TEST(RenderMelTest, FiveFramePlan) {
  const Utterance u = ParseUtterance(R"({"words": [{"orthography": "a",
      "phonemes": [{"symbol": "S"}, {"symbol": "AA", "stress": "primary"}]}]})");
  const DurationSequence d{{2, 3}};
  const MelSpectrogram mel = RenderMel(PlanProsody(u, d, d, Profile::kNeutral), u);
  EXPECT_EQ(mel.n_frames(), 5u);
  EXPECT_EQ(mel.n_bins, 80);
  // Boundary frames mix one third of the neighbour's template.
  const auto s = SpectralTemplate(*LookupSymbol("S"));
  const auto aa = SpectralTemplate(*LookupSymbol("AA"));
  for (int k = 0; k < kMelBins; ++k) {
    EXPECT_FLOAT_EQ(mel.row(0)[k], s[k]);
    EXPECT_FLOAT_EQ(mel.row(1)[k], static_cast<float>(2.0 / 3.0 * s[k] + 1.0 / 3.0 * aa[k]));
    EXPECT_FLOAT_EQ(mel.row(2)[k], static_cast<float>(2.0 / 3.0 * aa[k] + 1.0 / 3.0 * s[k]));
    EXPECT_FLOAT_EQ(mel.row(4)[k], aa[k]);
  }
}

std::set<std::vector<float>> DistinctRows(const MelSpectrogram& mel) {
  std::set<std::vector<float>> rows;
  for (std::size_t i = 0; i < mel.n_frames(); ++i) rows.emplace(mel.row(i).begin(), mel.row(i).end());
  return rows;
}

TEST(RenderMelTest, NeutralDilationOnlyRepeatsRows) {
  // Holds whenever every segment has an interior frame, i.e. all
  // durations are at least three frames.
  for (const auto& [id, u] : GenerateCorpus(30, 21)) {
    DurationSequence d = Predicted(u);
    for (int& f : d.frames) f = std::max(f, 3);
    const auto dilated = Dilate(d, UpsampleFlags(u), 1.5);
    const auto plain = RenderMel(PlanProsody(u, d, d, Profile::kNeutral), u);
    const auto plan = PlanProsody(u, dilated, d, Profile::kNeutral);
    EXPECT_TRUE(plan.correlates.empty());
    EXPECT_EQ(DistinctRows(plain), DistinctRows(RenderMel(plan, u))) << id;
  }
}

TEST(SpectralTemplateTest, ClassShapes) {
  const auto centers = MelBinCenters();
  ASSERT_EQ(centers.size(), 80u);
  EXPECT_GT(centers.front(), 0.0);
  EXPECT_LT(centers.back(), 12000.0);
  for (std::size_t k = 1; k < centers.size(); ++k) {
    EXPECT_GT(centers[k], centers[k - 1]);
    // Equal spacing on the mel scale.
    EXPECT_NEAR(HzToMel(centers[k]) - HzToMel(centers[k - 1]), HzToMel(12000.0) / 80.0, 1e-9);
  }
  EXPECT_NEAR(MelToHz(HzToMel(1234.5)), 1234.5, 1e-9);
  for (const InventoryEntry& e : Inventory()) {
    const auto t = SpectralTemplate(*LookupSymbol(e.symbol));
    ASSERT_EQ(t.size(), 80u);
    const bool all_zero = std::all_of(t.begin(), t.end(), [](float v) { return v == 0.0f; });
    EXPECT_EQ(all_zero, e.phoneme_class == PhonemeClass::kPause) << e.symbol;
  }
  // Fricative energy sits high, vowel energy low.
  auto low_high = [&](std::string_view s) {
    const auto t = SpectralTemplate(*LookupSymbol(s));
    double lo = 0, hi = 0;
    for (int k = 0; k < 80; ++k) (centers[k] < 3000 ? lo : hi) += t[k];
    return lo / hi;
  };
  EXPECT_GT(low_high("AA"), 1.0);
  EXPECT_LT(low_high("S"), 1.0);
}

TEST(FramesForWordTest, CumulativeSums) {
  const Utterance u = ParseUtterance(R"({"words": [
      {"orthography": "a", "phonemes": [{"symbol": "S"}, {"symbol": "AA", "stress": "primary"}]},
      {"orthography": "b", "phonemes": [{"symbol": "T"}]}]})");
  const DurationSequence d{{2, 3, 4}};
  EXPECT_EQ(FramesForWord(u, d, 1), (FrameRange{5, 9}));
  EXPECT_EQ(FramesForWord(u, d, 0), (FrameRange{0, 5}));
  EXPECT_THROW(FramesForWord(u, d, 2), Error);
}

MelSpectrogram RampMel(std::size_t frames) {
  MelSpectrogram mel;
  mel.magnitudes.resize(frames * kMelBins);
  mel.f0_hz.assign(frames, 150.0f);
  for (std::size_t i = 0; i < mel.magnitudes.size(); ++i) mel.magnitudes[i] = static_cast<float>(i % 97) * 0.25f + 1.0f;
  return mel;
}

TEST(MelEmphGainTest, ExactScalingInRangeOnly) {
  const MelSpectrogram mel = RampMel(6);
  const MelSpectrogram out = ApplyMelEmphGain(mel, {2, 4});
  EXPECT_EQ(out.f0_hz, mel.f0_hz);
  for (std::size_t i = 0; i < mel.n_frames(); ++i) {
    for (int k = 0; k < kMelBins; ++k) {
      const float in = mel.row(i)[k];
      const float expected = (i >= 2 && i < 4) ? static_cast<float>(static_cast<double>(in) * 1.15) : in;
      EXPECT_EQ(out.row(i)[k], expected);
    }
  }
  EXPECT_EQ(ApplyMelEmphGain(mel, {0, 6}, 1.0), mel);
  EXPECT_EQ(kMelEmphGain, 1.15);
}

TEST(MelEmphGainTest, ErrorsAndCommutation) {
  const MelSpectrogram mel = RampMel(6);
  EXPECT_THROW(ApplyMelEmphGain(mel, {4, 7}), Error);
  EXPECT_THROW(ApplyMelEmphGain(mel, {4, 3}), Error);
  EXPECT_THROW(ApplyMelEmphGain(mel, {0, 2}, 0.0), Error);
  const auto ab = ApplyMelEmphGain(ApplyMelEmphGain(mel, {0, 2}, 1.15), {3, 5}, 1.3);
  const auto ba = ApplyMelEmphGain(ApplyMelEmphGain(mel, {3, 5}, 1.3), {0, 2}, 1.15);
  EXPECT_EQ(ab, ba);
}

}  // namespace
}  // namespace emph
