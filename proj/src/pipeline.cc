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

#include "emph/pipeline.h"

#include <algorithm>
#include <limits>

#include "emph/error.h"
#include "emph/evalstats.h"
#include "json.hpp"

namespace emph {
namespace {

using json = nlohmann::json;

}  // namespace

std::string_view ModeName(EmphasisMode mode) {
  switch (mode) {
    case EmphasisMode::kNone: return "none";
    case EmphasisMode::kDd: return "dd";
    case EmphasisMode::kMel: return "mel";
    case EmphasisMode::kFlag: return "flag";
  }
  return "?";
}

EmphasisMode ParseMode(std::string_view name) {
  if (name == "none") return EmphasisMode::kNone;
  if (name == "dd") return EmphasisMode::kDd;
  if (name == "mel") return EmphasisMode::kMel;
  if (name == "flag") return EmphasisMode::kFlag;
  throw Error("unknown emphasis mode \"" + std::string(name) + "\"");
}

std::string_view ProfileName(Profile profile) {
  return profile == Profile::kNeutral ? "neutral" : "expressive";
}

Profile ParseProfile(std::string_view name) {
  if (name == "neutral") return Profile::kNeutral;
  if (name == "expressive") return Profile::kExpressive;
  throw Error("unknown profile \"" + std::string(name) + "\"");
}

double RunConfig::ResolvedAlphaDd() const {
  if (alpha_dd) return *alpha_dd;
  return profile == Profile::kNeutral ? kNeutralAlphaDd : kDefaultAlphaDd;
}

void RunConfig::Validate() const {
  const double a = ResolvedAlphaDd();
  if (!(a >= kMinDilation && a <= kMaxDilation)) {
    throw Error("alpha_dd " + std::to_string(a) + " outside [1.0, 1.5]");
  }
  if (!(alpha_mel >= 1.0 && alpha_mel <= 1.5)) {
    throw Error("alpha_mel " + std::to_string(alpha_mel) + " outside [1.0, 1.5]");
  }
  if (!(v_mel > 0.0)) throw Error("v_mel must be positive");
  if (prosody.pre_stress_silence_frames < 0) throw Error("silence frames must be non-negative");
  if (!(prosody.lengthening_threshold > 0.0)) throw Error("lengthening threshold must be positive");
}

RunConfig ParseRunConfig(std::string_view json_text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("config must be a JSON object");
  try {
    if (doc.contains("mode")) base.mode = ParseMode(doc["mode"].get<std::string>());
    if (doc.contains("profile")) base.profile = ParseProfile(doc["profile"].get<std::string>());
    if (doc.contains("alpha_dd")) base.alpha_dd = doc["alpha_dd"].get<double>();
    if (doc.contains("alpha_mel")) base.alpha_mel = doc["alpha_mel"].get<double>();
    if (doc.contains("v_mel")) base.v_mel = doc["v_mel"].get<double>();
    if (doc.contains("seed")) base.seed = doc["seed"].get<uint32_t>();
    if (doc.contains("prosody")) {
      const json& p = doc["prosody"];
      ProsodyConfig& c = base.prosody;
      c.lengthening_threshold = p.value("lengthening_threshold", c.lengthening_threshold);
      c.pre_stress_silence_frames = p.value("pre_stress_silence_frames", c.pre_stress_silence_frames);
      c.peak_ratio = p.value("peak_ratio", c.peak_ratio);
      c.low_ratio = p.value("low_ratio", c.low_ratio);
      c.low_position = p.value("low_position", c.low_position);
      c.f0_start_hz = p.value("f0_start_hz", c.f0_start_hz);
      c.f0_end_hz = p.value("f0_end_hz", c.f0_end_hz);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("invalid config value: ") + e.what());
  }
  return base;
}

Alignment BuildAlignment(const Utterance& utt, const ProsodyPlan& plan,
                         const FrameHops& hops) {
  if (hops.size() != plan.size()) throw Error("hop count does not match plan frames");
  std::vector<long long> offsets(plan.size() + 1, 0);
  for (std::size_t i = 0; i < plan.size(); ++i) offsets[i + 1] = offsets[i] + hops.hops[i];

  Alignment a;
  const auto& words = utt.words();
  a.words.resize(words.size());
  std::vector<bool> seen(words.size(), false);
  for (std::size_t w = 0; w < words.size(); ++w) {
    a.words[w].word_index = w;
    a.words[w].orthography = words[w].orthography;
    a.words[w].is_pause = words[w].is_pause;
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const PlanFrame& f = plan.frames[i];
    const std::size_t w = utt.WordOf(f.phoneme);
    WordAlignment& wa = a.words[w];
    if (!seen[w]) {
      wa.start_sample = offsets[i];
      seen[w] = true;
    }
    wa.end_sample = offsets[i + 1];
    if (!f.inserted_silence && words[w].stressed_vowel == f.phoneme && !wa.stressed_vowel_sample) {
      wa.stressed_vowel_sample = offsets[i];
    }
  }
  return a;
}

std::string SerializeCorrelates(const ProsodyPlan& plan) {
  json events = json::array();
  for (const CorrelateEvent& e : plan.correlates) {
    events.push_back({{"word_index", e.word_index},
                      {"pre_stress_silence_frames", e.pre_stress_silence_frames},
                      {"pitch_peak_hz", e.pitch_peak_hz},
                      {"pitch_low_hz", e.pitch_low_hz}});
  }
  return json{{"profile", std::string(ProfileName(plan.profile))},
              {"frames", plan.size()},
              {"injected_silence_frames", plan.InjectedSilenceFrames()},
              {"events", std::move(events)}}
             .dump(2) +
         "\n";
}

SynthesisResult Synthesize(const Utterance& utt, const RunConfig& config,
                           const DurationModel& model, const DurationSequence* oracle) {
  config.Validate();
  SynthesisResult r;
  r.reference = oracle ? *oracle : PredictDurations(model, utt);
  ValidateDurations(r.reference, utt.size());
  const PhonemeFlags flags = UpsampleFlags(utt);
  const VocoderConfig vocoder{config.seed};

  r.durations = r.reference;
  const PhonemeFlags* plan_flags = nullptr;
  switch (config.mode) {
    case EmphasisMode::kDd:
      r.durations = Dilate(r.reference, flags, config.ResolvedAlphaDd());
      break;
    case EmphasisMode::kFlag:
      plan_flags = &flags;
      break;
    case EmphasisMode::kNone:
    case EmphasisMode::kMel:
      break;
  }
  r.plan = PlanProsody(utt, r.durations, r.reference, config.profile, plan_flags, config.prosody);
  const MelSpectrogram mel = RenderMel(r.plan, utt);

  if (config.mode == EmphasisMode::kMel && utt.emphasis_target()) {
    const FrameRange range = FramesForWord(utt, r.durations, *utt.emphasis_target());
    r.mel = ApplyMelEmphGain(mel, range, config.v_mel);
    r.hops = MakeHops(r.mel.n_frames(), range, config.alpha_mel);
  } else {
    r.mel = mel;
    r.hops = MakeHops(r.mel.n_frames(), std::nullopt, 1.0);
  }
  r.waveform = Vocode(r.mel, r.hops, vocoder);
  r.alignment = BuildAlignment(utt, r.plan, r.hops);
  return r;
}

ExperimentSummary RunExperiment(const std::vector<std::pair<std::string, Utterance>>& corpus,
                                const std::vector<EmphasisMode>& modes, const RunConfig& config,
                                const DurationModel& model) {
  if (corpus.empty()) throw Error("experiment corpus is empty");
  if (modes.empty()) throw Error("no emphasis modes requested");

  ExperimentSummary summary;
  struct Accumulator {
    ModeOutcome outcome;
    std::vector<stats::IdentifiabilityRecord> records;
    double ratio_sum = 0.0;
    double silence_sum = 0.0;
    std::size_t injected = 0;
  };
  std::vector<Accumulator> acc(modes.size());
  double chance_sum = 0.0;

  for (const auto& [id, utt] : corpus) {
    if (!utt.emphasis_target()) throw Error("corpus utterance " + id + " has no emphasis target");
    const std::size_t target = *utt.emphasis_target();
    std::size_t content = 0;
    for (const Word& w : utt.words()) content += w.is_pause ? 0 : 1;
    chance_sum += 1.0 / static_cast<double>(content);

    RunConfig base_config = config;
    base_config.mode = EmphasisMode::kNone;
    const SynthesisResult base = Synthesize(utt, base_config, model);
    const auto base_reports = WordReport(base.waveform, base.alignment);

    for (std::size_t m = 0; m < modes.size(); ++m) {
      RunConfig mode_config = config;
      mode_config.mode = modes[m];
      const SynthesisResult run =
          modes[m] == EmphasisMode::kNone ? base : Synthesize(utt, mode_config, model);
      const auto reports =
          modes[m] == EmphasisMode::kNone ? base_reports : WordReport(run.waveform, run.alignment);
      const EmphasisGuess guess = IdentifyEmphasis(reports, base_reports);

      Accumulator& a = acc[m];
      ++a.outcome.utterances;
      if (!guess.detected) ++a.outcome.undetected;
      if (guess.detected && guess.word_index == target) ++a.outcome.correct;
      a.records.push_back({id, "machine", std::string(ModeName(modes[m])), utt.words().size(), target,
                           guess.word_index});
      a.ratio_sum += reports[target].duration_ms / base_reports[target].duration_ms;
      a.silence_sum += reports[target].pre_stress_silence_ms;
      if (!run.plan.correlates.empty()) ++a.injected;
    }
  }

  summary.chance = chance_sum / static_cast<double>(corpus.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    Accumulator& a = acc[m];
    ModeOutcome& o = a.outcome;
    o.mode = modes[m];
    const double n = static_cast<double>(o.utterances);
    o.accuracy = static_cast<double>(o.correct) / n;
    o.tie_break_accuracy = stats::Identifiability(a.records).fraction;
    o.mean_target_duration_ratio = a.ratio_sum / n;
    o.injected_fraction = static_cast<double>(a.injected) / n;
    o.mean_pre_stress_silence_ms = a.silence_sum / n;
    summary.modes.push_back(o);
  }
  return summary;
}

std::string SerializeExperiment(const ExperimentSummary& summary) {
  json modes = json::array();
  for (const ModeOutcome& o : summary.modes) {
    modes.push_back({{"mode", std::string(ModeName(o.mode))},
                     {"utterances", o.utterances},
                     {"correct", o.correct},
                     {"no_emphasis_detected", o.undetected},
                     {"accuracy", o.accuracy},
                     {"tie_break_accuracy", o.tie_break_accuracy},
                     {"mean_target_duration_ratio", o.mean_target_duration_ratio},
                     {"injected_fraction", o.injected_fraction},
                     {"mean_target_pre_stress_silence_ms", o.mean_pre_stress_silence_ms}});
  }
  return json{{"chance", summary.chance}, {"modes", std::move(modes)}}.dump(2) + "\n";
}

}  // namespace emph
