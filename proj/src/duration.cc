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

#include "emph/duration.h"

#include <cmath>
#include <numeric>

#include "emph/error.h"
#include "emph/numeric.h"
#include "json.hpp"

namespace emph {

using json = nlohmann::json;

long long DurationSequence::total() const {
  return std::accumulate(frames.begin(), frames.end(), 0LL);
}

void ValidateDurations(const DurationSequence& d, std::size_t expected_size) {
  if (d.size() != expected_size) {
    throw Error("duration length " + std::to_string(d.size()) +
                " does not match " + std::to_string(expected_size) + " phonemes");
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.frames[i] < 1) {
      throw Error("duration at phoneme " + std::to_string(i) + " is below one frame");
    }
  }
}

DurationSequence ParseDurations(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed durations JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error("durations must be a JSON array");
  DurationSequence d;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number_integer() || doc[i].get<int64_t>() < 1) {
      throw Error("duration at index " + std::to_string(i) +
                  " is not a positive integer");
    }
    d.frames.push_back(doc[i].get<int>());
  }
  return d;
}

std::string SerializeDurations(const DurationSequence& d) {
  return json(d.frames).dump() + "\n";
}

std::array<double, kNumPhonemeClasses> DurationModel::DefaultFallback() {
  std::array<double, kNumPhonemeClasses> f{};
  f[static_cast<int>(PhonemeClass::kVowel)] = 8.0;
  f[static_cast<int>(PhonemeClass::kStop)] = 5.0;
  f[static_cast<int>(PhonemeClass::kAffricate)] = 6.0;
  f[static_cast<int>(PhonemeClass::kFricative)] = 6.0;
  f[static_cast<int>(PhonemeClass::kNasal)] = 5.0;
  f[static_cast<int>(PhonemeClass::kLiquid)] = 5.0;
  f[static_cast<int>(PhonemeClass::kGlide)] = 4.0;
  f[static_cast<int>(PhonemeClass::kPause)] = 8.0;
  return f;
}

DurationModel::DurationModel() : fallback_(DefaultFallback()) {}

DurationModel::DurationModel(std::map<DurationKey, double> table,
                             std::array<double, kNumPhonemeClasses> fallback)
    : table_(std::move(table)), fallback_(fallback) {
  for (const auto& [key, mean] : table_) {
    if (!(mean > 0.0) || !std::isfinite(mean)) {
      throw Error("duration table mean must be positive");
    }
  }
  for (double mean : fallback_) {
    if (!(mean > 0.0) || !std::isfinite(mean)) {
      throw Error("duration fallback mean must be positive");
    }
  }
}

DurationKey KeyFor(const Utterance& utt, std::size_t phoneme) {
  const Phoneme& p = utt.phonemes()[phoneme];
  return DurationKey{p.id(), p.stress(), utt.IsWordFinal(phoneme)};
}

double DurationModel::Mean(const Utterance& utt, std::size_t phoneme) const {
  const auto it = table_.find(KeyFor(utt, phoneme));
  if (it != table_.end()) return it->second;
  return fallback_[static_cast<int>(utt.phonemes()[phoneme].phoneme_class())];
}

std::string DurationModel::ToJson() const {
  json doc = json::object();
  json table = json::array();
  for (const auto& [key, mean] : table_) {
    table.push_back({{"symbol", std::string(Inventory()[key.symbol_id].symbol)},
                     {"stress", std::string(StressName(key.stress))},
                     {"word_final", key.word_final},
                     {"mean", mean}});
  }
  json fallback = json::object();
  for (int c = 0; c < kNumPhonemeClasses; ++c) {
    fallback[std::string(ClassName(static_cast<PhonemeClass>(c)))] = fallback_[c];
  }
  doc["table"] = std::move(table);
  doc["fallback"] = std::move(fallback);
  return doc.dump(2) + "\n";
}

DurationModel DurationModel::FromJson(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed duration model JSON: ") + e.what());
  }
  std::map<DurationKey, double> table;
  auto fallback = DefaultFallback();
  if (doc.contains("table")) {
    for (const json& entry : doc["table"]) {
      const auto id = LookupSymbol(entry.at("symbol").get<std::string>());
      if (!id) throw Error("unknown symbol in duration table");
      const std::string s = entry.value("stress", "none");
      const Stress stress = s == "primary"     ? Stress::kPrimary
                            : s == "secondary" ? Stress::kSecondary
                                               : Stress::kNone;
      table[{*id, stress, entry.value("word_final", false)}] =
          entry.at("mean").get<double>();
    }
  }
  if (doc.contains("fallback")) {
    for (int c = 0; c < kNumPhonemeClasses; ++c) {
      const std::string name(ClassName(static_cast<PhonemeClass>(c)));
      if (doc["fallback"].contains(name)) fallback[c] = doc["fallback"][name].get<double>();
    }
  }
  return DurationModel(std::move(table), fallback);
}

DurationModel FitDurationModel(
    std::span<const std::pair<Utterance, DurationSequence>> corpus) {
  if (corpus.empty()) throw Error("duration corpus is empty");
  std::map<DurationKey, std::pair<double, long long>> sums;
  std::array<std::pair<double, long long>, kNumPhonemeClasses> class_sums{};
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    const auto& [utt, d] = corpus[u];
    if (d.size() != utt.size()) {
      throw Error("corpus entry " + std::to_string(u) + ": duration length " +
                  std::to_string(d.size()) + " does not match " +
                  std::to_string(utt.size()) + " phonemes");
    }
    ValidateDurations(d, utt.size());
    for (std::size_t p = 0; p < utt.size(); ++p) {
      auto& s = sums[KeyFor(utt, p)];
      s.first += d.frames[p];
      ++s.second;
      auto& cs = class_sums[static_cast<int>(utt.phonemes()[p].phoneme_class())];
      cs.first += d.frames[p];
      ++cs.second;
    }
  }
  std::map<DurationKey, double> table;
  for (const auto& [key, s] : sums) table[key] = s.first / static_cast<double>(s.second);
  auto fallback = DurationModel::DefaultFallback();
  for (int c = 0; c < kNumPhonemeClasses; ++c) {
    if (class_sums[c].second > 0) {
      fallback[c] = class_sums[c].first / static_cast<double>(class_sums[c].second);
    }
  }
  return DurationModel(std::move(table), fallback);
}

DurationSequence PredictDurations(const DurationModel& model, const Utterance& utt) {
  DurationSequence d;
  d.frames.reserve(utt.size());
  for (std::size_t p = 0; p < utt.size(); ++p) {
    const int64_t frames = RoundHalfUp(model.Mean(utt, p));
    d.frames.push_back(static_cast<int>(frames < 1 ? 1 : frames));
  }
  return d;
}

DurationSequence Dilate(const DurationSequence& d, const PhonemeFlags& flags,
                        double alpha) {
  if (!(alpha >= kMinDilation && alpha <= kMaxDilation)) {
    throw Error("dilation factor " + std::to_string(alpha) +
                " outside [1.0, 1.5]");
  }
  if (d.size() != flags.size()) {
    throw Error("duration length " + std::to_string(d.size()) +
                " does not match flag length " + std::to_string(flags.size()));
  }
  DurationSequence out = d;
  if (alpha == 1.0) return out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (flags.flags[i]) out.frames[i] = static_cast<int>(CeilScaled(d.frames[i], alpha));
  }
  return out;
}

}  // namespace emph
