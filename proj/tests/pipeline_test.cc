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


#include <cstring>
#include <string>

#include <gtest/gtest.h>

#include "emph/corpus.h"
#include "emph/error.h"
#include "emph/pipeline.h"

namespace emph {
namespace {

RunConfig Config(EmphasisMode mode, Profile profile = Profile::kExpressive) {
  RunConfig c;
  c.mode = mode;
  c.profile = profile;
  return c;
}

TEST(RunConfigTest, NamesAndDefaults) {
  for (EmphasisMode m : {EmphasisMode::kNone, EmphasisMode::kDd, EmphasisMode::kMel, EmphasisMode::kFlag}) {
    EXPECT_EQ(ParseMode(ModeName(m)), m);
  }
  EXPECT_THROW(ParseMode("loud"), Error);
  EXPECT_EQ(ParseProfile("neutral"), Profile::kNeutral);
  EXPECT_THROW(ParseProfile("happy"), Error);
  EXPECT_EQ(Config(EmphasisMode::kDd).ResolvedAlphaDd(), 1.5);
  EXPECT_EQ(Config(EmphasisMode::kDd, Profile::kNeutral).ResolvedAlphaDd(), 1.25);
}

TEST(RunConfigTest, ParseAndValidate) {
  const RunConfig c = ParseRunConfig(
      R"({"mode": "mel", "profile": "neutral", "alpha_mel": 1.3, "v_mel": 1.2, "seed": 9})");
  EXPECT_EQ(c.mode, EmphasisMode::kMel);
  EXPECT_EQ(c.profile, Profile::kNeutral);
  EXPECT_EQ(c.alpha_mel, 1.3);
  EXPECT_EQ(c.v_mel, 1.2);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_NO_THROW(c.Validate());
  RunConfig bad;
  bad.alpha_dd = 2.0;
  EXPECT_THROW(bad.Validate(), Error);
  bad.alpha_dd = 0.9;
  EXPECT_THROW(bad.Validate(), Error);
  bad = {};
  bad.alpha_mel = 1.6;
  EXPECT_THROW(bad.Validate(), Error);
  bad = {};
  bad.v_mel = 0.0;
  EXPECT_THROW(bad.Validate(), Error);
  EXPECT_THROW(ParseRunConfig("{"), Error);
  EXPECT_THROW(ParseRunConfig(R"({"mode": 3})"), Error);
}

TEST(SynthesizeTest, DdLengthensTargetWordAndInjectsSilence) {
  const Utterance u = FixtureUtterance();
  const auto none = Synthesize(u, Config(EmphasisMode::kNone));
  const auto dd = Synthesize(u, Config(EmphasisMode::kDd));
  EXPECT_TRUE(none.plan.correlates.empty());
  ASSERT_EQ(dd.plan.correlates.size(), 1u);
  EXPECT_EQ(dd.plan.correlates[0].word_index, 3u);
  EXPECT_EQ(dd.reference, none.reference);
  EXPECT_GT(dd.durations.total(), none.durations.total());
  const long long frames = static_cast<long long>(dd.plan.size());
  EXPECT_EQ(frames, dd.durations.total() + 3);
  EXPECT_EQ(static_cast<long long>(dd.waveform.samples.size()), frames * 300 + 300);
  EXPECT_EQ(static_cast<long long>(none.waveform.samples.size()), none.durations.total() * 300 + 300);

  const auto& wa_none = none.alignment.words[3];
  const auto& wa_dd = dd.alignment.words[3];
  EXPECT_GT(wa_dd.end_sample - wa_dd.start_sample, wa_none.end_sample - wa_none.start_sample);
  ASSERT_TRUE(wa_dd.stressed_vowel_sample);
  EXPECT_GT(*wa_dd.stressed_vowel_sample, wa_dd.start_sample);
}

TEST(SynthesizeTest, MelStretchesHopsOnly) {
  const Utterance u = FixtureUtterance();
  const auto none = Synthesize(u, Config(EmphasisMode::kNone));
  const auto mel = Synthesize(u, Config(EmphasisMode::kMel));
  EXPECT_EQ(mel.durations, none.durations);
  EXPECT_EQ(mel.plan.size(), none.plan.size());
  const FrameRange r = FramesForWord(u, none.durations, 3);
  for (std::size_t i = 0; i < mel.hops.size(); ++i) {
    EXPECT_EQ(mel.hops.hops[i], (i >= r.begin && i < r.end) ? 375 : 300);
  }
  EXPECT_EQ(mel.waveform.samples.size(), none.waveform.samples.size() + 75 * r.size());
}

TEST(SynthesizeTest, FlagInjectsWithoutLengthening) {
  const Utterance u = FixtureUtterance();
  const auto flag = Synthesize(u, Config(EmphasisMode::kFlag, Profile::kNeutral));
  EXPECT_EQ(flag.durations, flag.reference);
  ASSERT_EQ(flag.plan.correlates.size(), 1u);
  EXPECT_EQ(flag.plan.correlates[0].word_index, 3u);
}

TEST(SynthesizeTest, NeutralDdHasNoCorrelates) {
  const auto dd = Synthesize(FixtureUtterance(), Config(EmphasisMode::kDd, Profile::kNeutral));
  EXPECT_TRUE(dd.plan.correlates.empty());
  EXPECT_GT(dd.durations.total(), dd.reference.total());
}

TEST(SynthesizeTest, DeterministicAndSeeded) {
  const Utterance u = GenerateCorpus(1, 12)[0].second;
  const auto a = Synthesize(u, Config(EmphasisMode::kDd));
  const auto b = Synthesize(u, Config(EmphasisMode::kDd));
  ASSERT_EQ(a.waveform.samples.size(), b.waveform.samples.size());
  EXPECT_EQ(0, std::memcmp(a.waveform.samples.data(), b.waveform.samples.data(),
                           a.waveform.samples.size() * sizeof(float)));
  RunConfig other = Config(EmphasisMode::kDd);
  other.seed = 1234;
  EXPECT_NE(Synthesize(u, other).waveform.samples, a.waveform.samples);
}

TEST(SynthesizeTest, OracleDurationsAndErrors) {
  const Utterance u = FixtureUtterance();
  DurationSequence oracle{std::vector<int>(u.size(), 4)};
  const auto r = Synthesize(u, Config(EmphasisMode::kNone), {}, &oracle);
  EXPECT_EQ(r.durations, oracle);
  DurationSequence wrong{{1, 2}};
  EXPECT_THROW(Synthesize(u, Config(EmphasisMode::kNone), {}, &wrong), Error);
  RunConfig bad = Config(EmphasisMode::kDd);
  bad.alpha_dd = 1.7;
  EXPECT_THROW(Synthesize(u, bad), Error);
}

TEST(SynthesizeTest, CorrelatesDocument) {
  const auto dd = Synthesize(FixtureUtterance(), Config(EmphasisMode::kDd));
  const std::string doc = SerializeCorrelates(dd.plan);
  EXPECT_NE(doc.find("\"injected_silence_frames\": 3"), std::string::npos);
  EXPECT_NE(doc.find("\"expressive\""), std::string::npos);
}

TEST(ExperimentTest, SmallCorpus) {
  const Corpus c = GenerateCorpus(4, 11);
  const auto s = RunExperiment(c, {EmphasisMode::kNone, EmphasisMode::kDd}, RunConfig{});
  ASSERT_EQ(s.modes.size(), 2u);
  EXPECT_GT(s.chance, 0.0);
  EXPECT_LT(s.chance, 0.5);
  EXPECT_EQ(s.modes[0].utterances, 4u);
  EXPECT_EQ(s.modes[0].undetected, 4u);
  EXPECT_EQ(s.modes[0].accuracy, 0.0);
  EXPECT_EQ(s.modes[0].injected_fraction, 0.0);
  EXPECT_EQ(s.modes[1].injected_fraction, 1.0);
  EXPECT_GT(s.modes[1].mean_target_duration_ratio, 1.2);
  const std::string doc = SerializeExperiment(s);
  EXPECT_NE(doc.find("\"tie_break_accuracy\""), std::string::npos);
}

TEST(ExperimentTest, Errors) {
  EXPECT_THROW(RunExperiment({}, {EmphasisMode::kDd}, RunConfig{}), Error);
  const Corpus c = GenerateCorpus(1, 1);
  EXPECT_THROW(RunExperiment(c, {}, RunConfig{}), Error);
  Corpus untargeted = {{"x", c[0].second.WithTarget(std::nullopt)}};
  EXPECT_THROW(RunExperiment(untargeted, {EmphasisMode::kDd}, RunConfig{}), Error);
}

}  // namespace
}  // namespace emph
