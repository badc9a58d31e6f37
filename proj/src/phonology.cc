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

#include "emph/phonology.h"

#include <array>
#include <string>

#include "emph/error.h"
#include "json.hpp"

namespace emph {
namespace {

using json = nlohmann::json;
using C = PhonemeClass;

constexpr std::array<InventoryEntry, 43> kInventory = {{
    {"AA", C::kVowel, true},      {"AE", C::kVowel, true},
    {"AH", C::kVowel, true},      {"AO", C::kVowel, true},
    {"AW", C::kVowel, true},      {"AX", C::kVowel, true},
    {"AY", C::kVowel, true},      {"EH", C::kVowel, true},
    {"ER", C::kVowel, true},      {"EY", C::kVowel, true},
    {"IH", C::kVowel, true},      {"IX", C::kVowel, true},
    {"IY", C::kVowel, true},      {"OW", C::kVowel, true},
    {"OY", C::kVowel, true},      {"UH", C::kVowel, true},
    {"UW", C::kVowel, true},      {"P", C::kStop, false},
    {"B", C::kStop, true},        {"T", C::kStop, false},
    {"D", C::kStop, true},        {"K", C::kStop, false},
    {"G", C::kStop, true},        {"CH", C::kAffricate, false},
    {"JH", C::kAffricate, true},  {"F", C::kFricative, false},
    {"V", C::kFricative, true},   {"TH", C::kFricative, false},
    {"DH", C::kFricative, true},  {"S", C::kFricative, false},
    {"Z", C::kFricative, true},   {"SH", C::kFricative, false},
    {"ZH", C::kFricative, true},  {"HH", C::kFricative, false},
    {"M", C::kNasal, true},       {"N", C::kNasal, true},
    {"NG", C::kNasal, true},      {"L", C::kLiquid, true},
    {"R", C::kLiquid, true},      {"W", C::kGlide, true},
    {"Y", C::kGlide, true},       {"SIL", C::kPause, false},
    {"SP", C::kPause, false},
}};

Stress ParseStress(const json& value, const std::string& where) {
  if (!value.is_string()) throw Error("stress must be a string " + where);
  const std::string s = value.get<std::string>();
  if (s == "none") return Stress::kNone;
  if (s == "primary") return Stress::kPrimary;
  if (s == "secondary") return Stress::kSecondary;
  throw Error("invalid stress \"" + s + "\" " + where);
}

std::string Where(std::size_t word, std::size_t phoneme) {
  return "at word " + std::to_string(word) + ", phoneme " +
         std::to_string(phoneme);
}

}  // namespace

std::string_view ClassName(PhonemeClass c) {
  switch (c) {
    case C::kVowel: return "vowel";
    case C::kStop: return "stop";
    case C::kAffricate: return "affricate";
    case C::kFricative: return "fricative";
    case C::kNasal: return "nasal";
    case C::kLiquid: return "liquid";
    case C::kGlide: return "glide";
    case C::kPause: return "pause";
  }
  return "?";
}

std::string_view StressName(Stress s) {
  switch (s) {
    case Stress::kNone: return "none";
    case Stress::kPrimary: return "primary";
    case Stress::kSecondary: return "secondary";
  }
  return "?";
}

std::span<const InventoryEntry> Inventory() { return kInventory; }

std::optional<uint8_t> LookupSymbol(std::string_view symbol) {
  for (std::size_t i = 0; i < kInventory.size(); ++i) {
    if (kInventory[i].symbol == symbol) return static_cast<uint8_t>(i);
  }
  return std::nullopt;
}

Phoneme Phoneme::Make(std::string_view symbol, Stress stress) {
  const auto id = LookupSymbol(symbol);
  if (!id) throw Error("unknown symbol \"" + std::string(symbol) + "\"");
  if (stress != Stress::kNone && kInventory[*id].phoneme_class != C::kVowel) {
    throw Error("stress on non-vowel \"" + std::string(symbol) + "\"");
  }
  return Phoneme(*id, stress);
}

Utterance Utterance::Create(std::vector<Phoneme> phonemes,
                            std::vector<Word> words,
                            std::optional<std::size_t> emphasis_target) {
  if (words.empty()) throw Error("utterance has no words");
  std::size_t expected_begin = 0;
  for (std::size_t w = 0; w < words.size(); ++w) {
    Word& word = words[w];
    const std::string at = "at word " + std::to_string(w);
    if (word.begin >= word.end) throw Error("empty phoneme range " + at);
    if (word.begin < expected_begin) throw Error("overlapping word ranges " + at);
    if (word.begin > expected_begin) throw Error("gap before word range " + at);
    if (word.end > phonemes.size()) throw Error("word range past end " + at);
    expected_begin = word.end;

    std::size_t pauses = 0;
    for (std::size_t p = word.begin; p < word.end; ++p) {
      if (phonemes[p].is_pause()) ++pauses;
    }
    if (pauses != 0 && pauses != word.size()) {
      throw Error("pause mixed with speech phonemes " + at);
    }
    word.is_pause = pauses == word.size();
    if (word.stressed_vowel) {
      const std::size_t v = *word.stressed_vowel;
      if (!word.contains(v)) throw Error("stressed vowel outside word " + at);
      if (!phonemes[v].is_vowel()) throw Error("stressed vowel is not a vowel " + at);
    } else {
      for (std::size_t p = word.begin; p < word.end; ++p) {
        if (phonemes[p].is_vowel()) {
          throw Error("missing stressed vowel " + at);
        }
      }
    }
  }
  if (expected_begin != phonemes.size()) {
    throw Error("phonemes not covered by any word after index " +
                std::to_string(expected_begin));
  }
  if (emphasis_target) {
    if (*emphasis_target >= words.size()) {
      throw Error("emphasis index " + std::to_string(*emphasis_target) +
                  " out of range for " + std::to_string(words.size()) +
                  " words");
    }
    if (words[*emphasis_target].is_pause) {
      throw Error("emphasis index " + std::to_string(*emphasis_target) +
                  " names a pause");
    }
  }

  Utterance utt;
  utt.word_of_.resize(phonemes.size());
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::size_t p = words[w].begin; p < words[w].end; ++p) utt.word_of_[p] = w;
  }
  utt.phonemes_ = std::move(phonemes);
  utt.words_ = std::move(words);
  utt.target_ = emphasis_target;
  return utt;
}

Utterance Utterance::WithTarget(std::optional<std::size_t> target) const {
  return Create(phonemes_, words_, target);
}

PhonemeFlags UpsampleFlags(const Utterance& utt) {
  PhonemeFlags out;
  out.flags.assign(utt.size(), 0);
  if (const auto target = utt.emphasis_target()) {
    const Word& word = utt.words()[*target];
    for (std::size_t p = word.begin; p < word.end; ++p) out.flags[p] = 1;
  }
  return out;
}

Utterance ParseUtterance(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed utterance JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("utterance document must be an object");
  if (!doc.contains("words") || !doc["words"].is_array()) {
    throw Error("utterance document needs a \"words\" array");
  }

  std::vector<Phoneme> phonemes;
  std::vector<Word> words;
  const json& jwords = doc["words"];
  for (std::size_t w = 0; w < jwords.size(); ++w) {
    const json& jw = jwords[w];
    const std::string at = "at word " + std::to_string(w);
    if (!jw.is_object()) throw Error("word entry must be an object " + at);
    if (!jw.contains("phonemes") || !jw["phonemes"].is_array()) {
      throw Error("missing phonemes array " + at);
    }
    Word word;
    word.begin = phonemes.size();
    if (jw.contains("orthography")) {
      if (!jw["orthography"].is_string()) throw Error("orthography must be a string " + at);
      word.orthography = jw["orthography"].get<std::string>();
    }
    const json& jp = jw["phonemes"];
    for (std::size_t p = 0; p < jp.size(); ++p) {
      const json& entry = jp[p];
      if (!entry.is_object() || !entry.contains("symbol") ||
          !entry["symbol"].is_string()) {
        throw Error("phoneme needs a symbol " + Where(w, p));
      }
      const std::string symbol = entry["symbol"].get<std::string>();
      const auto id = LookupSymbol(symbol);
      if (!id) {
        throw Error("unknown symbol " + Where(w, p) + ": \"" + symbol + "\"");
      }
      Stress stress = Stress::kNone;
      if (entry.contains("stress")) stress = ParseStress(entry["stress"], Where(w, p));
      if (stress != Stress::kNone && kInventory[*id].phoneme_class != C::kVowel) {
        throw Error("stress on non-vowel " + Where(w, p));
      }
      phonemes.push_back(Phoneme::Make(symbol, stress));
    }
    word.end = phonemes.size();
    if (jw.contains("stressed_vowel")) {
      const json& sv = jw["stressed_vowel"];
      if (!sv.is_number_integer() || sv.get<int64_t>() < 0 ||
          static_cast<std::size_t>(sv.get<int64_t>()) >= jp.size()) {
        throw Error("stressed_vowel out of range " + at);
      }
      word.stressed_vowel = word.begin + sv.get<std::size_t>();
    } else {
      // Primary stress wins, then secondary, then the first vowel.
      std::optional<std::size_t> first_vowel, secondary;
      for (std::size_t p = word.begin; p < word.end; ++p) {
        if (!phonemes[p].is_vowel()) continue;
        if (!first_vowel) first_vowel = p;
        if (phonemes[p].stress() == Stress::kPrimary) {
          word.stressed_vowel = p;
          break;
        }
        if (phonemes[p].stress() == Stress::kSecondary && !secondary) secondary = p;
      }
      if (!word.stressed_vowel) word.stressed_vowel = secondary ? secondary : first_vowel;
    }
    words.push_back(std::move(word));
  }

  std::optional<std::size_t> target;
  if (doc.contains("emphasis_word_index") && !doc["emphasis_word_index"].is_null()) {
    const json& e = doc["emphasis_word_index"];
    if (!e.is_number_integer()) throw Error("emphasis_word_index must be an integer");
    const int64_t v = e.get<int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= words.size()) {
      throw Error("emphasis index " + std::to_string(v) + " out of range for " +
                  std::to_string(words.size()) + " words");
    }
    target = static_cast<std::size_t>(v);
  }
  return Utterance::Create(std::move(phonemes), std::move(words), target);
}

std::string SerializeUtterance(const Utterance& utt) {
  json doc = json::object();
  json jwords = json::array();
  for (const Word& word : utt.words()) {
    json jw = json::object();
    jw["orthography"] = word.orthography;
    json jp = json::array();
    for (std::size_t p = word.begin; p < word.end; ++p) {
      const Phoneme& ph = utt.phonemes()[p];
      json entry = json::object();
      entry["symbol"] = std::string(ph.symbol());
      if (ph.stress() != Stress::kNone) entry["stress"] = std::string(StressName(ph.stress()));
      jp.push_back(std::move(entry));
    }
    jw["phonemes"] = std::move(jp);
    if (word.stressed_vowel) jw["stressed_vowel"] = *word.stressed_vowel - word.begin;
    jwords.push_back(std::move(jw));
  }
  doc["words"] = std::move(jwords);
  if (utt.emphasis_target()) doc["emphasis_word_index"] = *utt.emphasis_target();
  return doc.dump(2) + "\n";
}

}  // namespace emph
