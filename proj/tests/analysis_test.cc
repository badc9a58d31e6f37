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
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "emph/acoustics.h"
#include "emph/analysis.h"
#include "emph/error.h"
#include "emph/phonology.h"
#include "emph/vocoder.h"

namespace emph {
namespace {

Waveform Sine(double hz, double seconds, double amplitude = 1.0) {
  Waveform w;
  const auto n = static_cast<std::size_t>(seconds * w.sample_rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.samples[i] = static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / w.sample_rate));
  }
  return w;
}

std::vector<double> Voiced(const F0Track& t) {
  std::vector<double> out;
  for (const F0Frame& f : t.frames) {
    if (f.f0_hz) out.push_back(*f.f0_hz);
  }
  return out;
}

TEST(EstimateF0Test, PureTone220) {
  const F0Track t = EstimateF0(Sine(220.0, 1.0));
  EXPECT_DOUBLE_EQ(t.hop_s, 0.010);
  const auto f = Voiced(t);
  EXPECT_GE(f.size(), 90u);
  for (double v : f) EXPECT_NEAR(v, 220.0, 220.0 * 0.02);
}

TEST(EstimateF0Test, SilenceAndEmpty) {
  Waveform silent;
  silent.samples.assign(24000, 0.0f);
  const F0Track t = EstimateF0(silent);
  EXPECT_FALSE(t.frames.empty());
  EXPECT_TRUE(Voiced(t).empty());
  EXPECT_TRUE(EstimateF0(Waveform{}).frames.empty());
}

TEST(EstimateF0Test, QuietToneIsGated) {
  // -60 dBFS RMS sits under the -50 dBFS gate.
  const auto f = Voiced(EstimateF0(Sine(200.0, 0.5, std::sqrt(2.0) * 1e-3)));
  EXPECT_TRUE(f.empty());
}

TEST(EstimateF0Test, WhiteNoiseIsMostlyUnvoiced) {
  Waveform w;
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> u(-0.5f, 0.5f);
  for (int i = 0; i < 24000; ++i) w.samples.push_back(u(rng));
  EXPECT_LT(Voiced(EstimateF0(w)).size(), 10u);
}

class PureToneSweep : public ::testing::TestWithParam<double> {};

TEST_P(PureToneSweep, WithinTwoPercent) {
  const double hz = GetParam();
  const auto f = Voiced(EstimateF0(Sine(hz, 0.5, 0.5)));
  EXPECT_GE(f.size(), 40u) << hz;
  for (double v : f) {
    EXPECT_NEAR(v, hz, hz * 0.02);
    EXPECT_GE(v, 70.0);
    EXPECT_LE(v, 400.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Sweep, PureToneSweep,
                         ::testing::Values(80.0, 95.0, 110.0, 133.0, 150.0, 175.0, 200.0, 237.0,
                                           260.0, 300.0, 333.0, 370.0, 400.0));

TEST(EstimateF0Test, VocodedPulseTrain) {
  MelSpectrogram mel;
  const auto t = SpectralTemplate(*LookupSymbol("AA"));
  for (int i = 0; i < 100; ++i) mel.magnitudes.insert(mel.magnitudes.end(), t.begin(), t.end());
  mel.f0_hz.assign(100, 150.0f);
  const Waveform w = Vocode(mel, MakeHops(100, std::nullopt));
  auto f = Voiced(EstimateF0(w));
  ASSERT_GE(f.size(), 100u);
  std::nth_element(f.begin(), f.begin() + f.size() / 2, f.end());
  EXPECT_NEAR(f[f.size() / 2], 150.0, 150.0 * 0.05);
}

TEST(IntensityTest, SineLevelsAndFloor) {
  const IntensityTrack full = Intensity(Sine(1000.0, 0.5));
  EXPECT_DOUBLE_EQ(full.hop_s, 0.005);
  for (std::size_t k = 2; k + 2 < full.db.size(); ++k) EXPECT_NEAR(full.db[k], -3.01, 0.1);
  const IntensityTrack half = Intensity(Sine(1000.0, 0.5, 0.5));
  for (std::size_t k = 2; k + 2 < half.db.size(); ++k) EXPECT_NEAR(half.db[k], -9.03, 0.1);
  Waveform zeros;
  zeros.samples.assign(4800, 0.0f);
  for (double v : Intensity(zeros).db) EXPECT_EQ(v, kIntensityFloorDb);
  EXPECT_TRUE(Intensity(Waveform{}).db.empty());
}

TEST(IntensityTest, DoublingAmplitudeAddsSixDb) {
  const auto a = Intensity(Sine(313.0, 0.3, 0.2)).db;
  const auto b = Intensity(Sine(313.0, 0.3, 0.4)).db;
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > -80.0) {
      EXPECT_NEAR(b[k] - a[k], 20.0 * std::log10(2.0), 1e-4);
    }
  }
}

TEST(IntensityTest, ShiftInvariance) {
  const Waveform w = Sine(440.0, 0.25, 0.3);
  for (int hops : {1, 3, 10}) {
    Waveform shifted;
    shifted.samples.assign(static_cast<std::size_t>(hops) * 120, 0.0f);
    shifted.samples.insert(shifted.samples.end(), w.samples.begin(), w.samples.end());
    const auto a = Intensity(w).db;
    const auto b = Intensity(shifted).db;
    ASSERT_EQ(b.size(), a.size() + static_cast<std::size_t>(hops));
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(b[k + static_cast<std::size_t>(hops)], a[k], 1e-9);
  }
}

IntensityTrack Track(std::vector<double> db) { return IntensityTrack{0.010, std::move(db)}; }

TEST(DetectSilencesTest, Examples) {
  std::vector<double> db(20, -20.0);
  std::fill(db.begin() + 7, db.begin() + 12, -90.0);
  const auto segs = DetectSilences(Track(db));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_NEAR(segs[0].duration_ms(), 50.0, 1e-9);
  EXPECT_NEAR(segs[0].start_s, 0.07, 1e-12);

  std::vector<double> one(20, -20.0);
  one[4] = -90.0;
  EXPECT_TRUE(DetectSilences(Track(one)).empty());

  const auto all = DetectSilences(Track(std::vector<double>(30, -70.0)));
  ASSERT_EQ(all.size(), 1u);
  EXPECT_NEAR(all[0].start_s, 0.0, 1e-12);
  EXPECT_NEAR(all[0].end_s, 0.30, 1e-12);

  // Threshold is strict: a frame at exactly -50 dB is not silent.
  EXPECT_TRUE(DetectSilences(Track(std::vector<double>(10, -50.0))).empty());
}

TEST(DetectSilencesTest, SegmentsDisjointSortedAndLongEnough) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> db(100);
    for (double& v : db) v = (rng() % 3 == 0) ? -80.0 : -10.0;
    const double min_ms = 10.0 * static_cast<double>(1 + rng() % 4);
    const auto segs = DetectSilences(Track(db), -50.0, min_ms);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      EXPECT_GE(segs[i].duration_ms(), min_ms - 1e-9);
      if (i > 0) {
        EXPECT_LT(segs[i - 1].end_s, segs[i].start_s);
      }
    }
    // Every long enough run is reported.
    std::size_t runs = 0;
    for (std::size_t i = 0; i < db.size();) {
      std::size_t j = i;
      while (j < db.size() && db[j] < -50.0) ++j;
      if (j > i) {
        if (static_cast<double>(j - i) * 10.0 >= min_ms) ++runs;
        i = j;
      } else {
        ++i;
      }
    }
    EXPECT_EQ(segs.size(), runs);
  }
}

TEST(WordReportTest, PureToneWord) {
  Waveform w = Sine(200.0, 1.0, 0.5);
  std::fill(w.samples.begin(), w.samples.begin() + 4800, 0.0f);
  Alignment a;
  a.words.push_back({0, "<sil>", 0, 4800, std::nullopt, true});
  a.words.push_back({1, "tone", 4800, 24000, 4800, false});
  const auto reports = WordReport(w, a);
  ASSERT_EQ(reports.size(), 2u);
  const auto& r = reports[1];
  ASSERT_TRUE(r.f0_mean_hz);
  EXPECT_NEAR(*r.f0_mean_hz, 200.0, 4.0);
  EXPECT_LE(*r.f0_min_hz, *r.f0_mean_hz);
  EXPECT_LE(*r.f0_mean_hz, *r.f0_max_hz);
  EXPECT_NEAR(r.f0_range_hz, *r.f0_max_hz - *r.f0_min_hz, 1e-12);
  EXPECT_NEAR(r.duration_ms, 800.0, 1e-9);
  EXPECT_LE(r.intensity_mean_db, r.intensity_max_db);
  EXPECT_NEAR(r.intensity_max_db, -9.03, 0.2);
  // A silence ending right at the onset counts, whatever word it belongs to.
  EXPECT_NEAR(r.pre_stress_silence_ms, 200.0, 10.0);
  EXPECT_FALSE(reports[0].f0_mean_hz);
  EXPECT_LT(reports[0].intensity_mean_db, r.intensity_mean_db - 10.0);
}

TEST(WordReportTest, NoSilenceBeforeOnset) {
  const Waveform w = Sine(200.0, 1.0, 0.5);
  Alignment a;
  a.words.push_back({0, "tone", 0, 24000, 12000, false});
  EXPECT_EQ(WordReport(w, a)[0].pre_stress_silence_ms, 0.0);
}

TEST(WordReportTest, OutOfRangeAlignment) {
  const Waveform w = Sine(200.0, 0.5);
  Alignment a;
  a.words.push_back({0, "x", 0, 12001, std::nullopt, false});
  EXPECT_THROW(WordReport(w, a), Error);
  a.words = {{0, "x", 0, 6000, std::nullopt, false}, {1, "y", 5000, 8000, std::nullopt, false}};
  EXPECT_THROW(WordReport(w, a), Error);
  a.words = {{0, "x", 100, 100, std::nullopt, false}};
  EXPECT_THROW(WordReport(w, a), Error);
}

TEST(AlignmentTest, JsonRoundTrip) {
  Alignment a;
  a.words.push_back({0, "<sil>", 0, 300, std::nullopt, true});
  a.words.push_back({1, "word", 300, 900, 450, false});
  const Alignment b = ParseAlignment(SerializeAlignment(a));
  ASSERT_EQ(b.words.size(), 2u);
  EXPECT_EQ(b.words[1].stressed_vowel_sample, 450);
  EXPECT_TRUE(b.words[0].is_pause);
  EXPECT_EQ(b.words[1].orthography, "word");
  EXPECT_THROW(ParseAlignment("{"), Error);
  EXPECT_THROW(ParseAlignment(R"({"words": [{"word_index": 0}]})"), Error);
}

WordAcousticReport Report(double duration_ms) {
  WordAcousticReport r;
  r.duration_ms = duration_ms;
  r.f0_range_hz = 10.0;
  r.intensity_max_db = -20.0;
  return r;
}

TEST(IdentifyEmphasisTest, IdenticalReportsDetectNothing) {
  const std::vector<WordAcousticReport> base{Report(100), Report(200), Report(150)};
  const EmphasisGuess g = IdentifyEmphasis(base, base);
  EXPECT_FALSE(g.detected);
  EXPECT_EQ(g.word_index, 0u);
  for (double s : g.scores) EXPECT_EQ(s, 0.0);
}

TEST(IdentifyEmphasisTest, SingleDominantFeature) {
  const std::vector<WordAcousticReport> base{Report(100), Report(200), Report(150), Report(80)};
  auto emph = base;
  emph[2].duration_ms = 225.0;
  const EmphasisGuess g = IdentifyEmphasis(emph, base);
  EXPECT_TRUE(g.detected);
  EXPECT_EQ(g.word_index, 2u);
}

TEST(IdentifyEmphasisTest, TieBreaksToLowestIndexAndSkipsPauses) {
  std::vector<WordAcousticReport> base{Report(100), Report(100), Report(100), Report(100)};
  base[0].is_pause = true;
  auto emph = base;
  emph[0].duration_ms = 900.0;
  emph[1].pre_stress_silence_ms = 30.0;
  emph[3].pre_stress_silence_ms = 30.0;
  const EmphasisGuess g = IdentifyEmphasis(emph, base);
  EXPECT_TRUE(g.detected);
  EXPECT_EQ(g.word_index, 1u);
  EXPECT_EQ(g.scores[0], 0.0);
  EXPECT_DOUBLE_EQ(g.scores[1], g.scores[3]);
}

TEST(IdentifyEmphasisTest, ScoresSumOfZScores) {
  const std::vector<WordAcousticReport> base{Report(100), Report(100), Report(100)};
  auto emph = base;
  emph[0].duration_ms = 150.0;
  emph[1].f0_range_hz = 40.0;
  const EmphasisGuess g = IdentifyEmphasis(emph, base);
  // Each feature has one outlier over three words: z = +sqrt(2) for the
  // outlier and -1/sqrt(2) for the rest.
  const double hi = std::sqrt(2.0);
  const double lo = -1.0 / std::sqrt(2.0);
  EXPECT_NEAR(g.scores[0], hi + lo, 1e-12);
  EXPECT_NEAR(g.scores[1], lo + hi, 1e-12);
  EXPECT_NEAR(g.scores[2], 2 * lo, 1e-12);
  EXPECT_EQ(g.word_index, 0u);
}

TEST(IdentifyEmphasisTest, Errors) {
  const std::vector<WordAcousticReport> two{Report(1), Report(2)};
  const std::vector<WordAcousticReport> three{Report(1), Report(2), Report(3)};
  EXPECT_THROW(IdentifyEmphasis(two, three), Error);
  EXPECT_THROW(IdentifyEmphasis({}, {}), Error);
}

}  // namespace
}  // namespace emph
