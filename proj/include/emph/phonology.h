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

#ifndef EMPH_PHONOLOGY_H_
#define EMPH_PHONOLOGY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emph {

enum class PhonemeClass : uint8_t {
  kVowel,
  kStop,
  kAffricate,
  kFricative,
  kNasal,
  kLiquid,
  kGlide,
  kPause,
};
inline constexpr int kNumPhonemeClasses = 8;

enum class Stress : uint8_t { kNone, kPrimary, kSecondary };

std::string_view ClassName(PhonemeClass c);
std::string_view StressName(Stress s);

struct InventoryEntry {
  std::string_view symbol;
  PhonemeClass phoneme_class;
  bool voiced;
};

// The built-in ARPAbet-style inventory. Ids are indices into this table.
std::span<const InventoryEntry> Inventory();

// Inventory id for a symbol, or nullopt when the symbol is unknown.
std::optional<uint8_t> LookupSymbol(std::string_view symbol);

class Phoneme {
 public:
  // Throws emph::Error for an unknown symbol or stress on a non-vowel.
  static Phoneme Make(std::string_view symbol, Stress stress = Stress::kNone);

  uint8_t id() const { return id_; }
  std::string_view symbol() const { return Inventory()[id_].symbol; }
  PhonemeClass phoneme_class() const { return Inventory()[id_].phoneme_class; }
  bool voiced() const { return Inventory()[id_].voiced; }
  Stress stress() const { return stress_; }
  bool is_vowel() const { return phoneme_class() == PhonemeClass::kVowel; }
  bool is_pause() const { return phoneme_class() == PhonemeClass::kPause; }

  friend bool operator==(const Phoneme&, const Phoneme&) = default;

 private:
  Phoneme(uint8_t id, Stress stress) : id_(id), stress_(stress) {}
  uint8_t id_;
  Stress stress_;
};

struct Word {
  // Half-open range into the utterance phoneme list.
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string orthography;
  // Absolute phoneme index; absent for words without a vowel.
  std::optional<std::size_t> stressed_vowel;
  // Pause pseudo-words hold only pause phonemes.
  bool is_pause = false;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t phoneme) const {
    return phoneme >= begin && phoneme < end;
  }
  friend bool operator==(const Word&, const Word&) = default;
};

// A phonemized sentence with word boundaries and at most one emphasized word.
// Immutable once built.
class Utterance {
 public:
  // Validates every invariant; throws emph::Error naming the offending word.
  static Utterance Create(std::vector<Phoneme> phonemes, std::vector<Word> words,
                          std::optional<std::size_t> emphasis_target);

  const std::vector<Phoneme>& phonemes() const { return phonemes_; }
  const std::vector<Word>& words() const { return words_; }
  std::optional<std::size_t> emphasis_target() const { return target_; }
  std::size_t size() const { return phonemes_.size(); }

  // Word index containing the phoneme.
  std::size_t WordOf(std::size_t phoneme) const { return word_of_[phoneme]; }
  // True when the phoneme is the last one of its word.
  bool IsWordFinal(std::size_t phoneme) const {
    return words_[word_of_[phoneme]].end == phoneme + 1;
  }

  // Same utterance with a different (or no) emphasis target.
  Utterance WithTarget(std::optional<std::size_t> target) const;

  friend bool operator==(const Utterance& a, const Utterance& b) {
    return a.phonemes_ == b.phonemes_ && a.words_ == b.words_ &&
           a.target_ == b.target_;
  }

 private:
  Utterance() = default;
  std::vector<Phoneme> phonemes_;
  std::vector<Word> words_;
  std::optional<std::size_t> target_;
  std::vector<std::size_t> word_of_;
};

struct PhonemeFlags {
  std::vector<uint8_t> flags;
  std::size_t size() const { return flags.size(); }
};

// Word-level emphasis flag spread over the phonemes of the target word.
PhonemeFlags UpsampleFlags(const Utterance& utt);

// Reads the utterance JSON document. Throws emph::Error with the location
// of the first problem.
Utterance ParseUtterance(std::string_view json_text);

// Canonical JSON text; identical utterances give identical bytes.
std::string SerializeUtterance(const Utterance& utt);

}  // namespace emph

#endif  // EMPH_PHONOLOGY_H_
