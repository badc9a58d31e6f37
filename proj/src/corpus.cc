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


#include "emph/corpus.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "emph/error.h"

namespace emph {
namespace {

constexpr LexiconEntry kLexicon[] = {
    {"and", "AE1 N D", false},
    {"it's", "IH1 T S", false},
    {"one", "W AH1 N", false},
    {"of", "AH1 V", false},
    {"the", "DH AH0", false},
    {"we", "W IY1", false},
    {"to", "T UW1", false},
    {"a", "AH0", false},
    {"in", "IH1 N", false},
    {"is", "IH1 Z", false},
    {"they", "DH EY1", false},
    {"with", "W IH1 DH", false},
    {"for", "F AO1 R", false},
    {"on", "AA1 N", false},
    {"traditionally", "T R AH0 D IH1 SH AH0 N AH0 L IY0", true},
    {"experiences", "IH0 K S P IH1 R IY0 AH0 N S IH0 Z", true},
    {"naturally", "N AE1 CH ER0 AH0 L IY0", true},
    {"try", "T R AY1", true},
    {"avoid", "AH0 V OY1 D", true},
    {"garden", "G AA1 R D AH0 N", true},
    {"morning", "M AO1 R N IH0 NG", true},
    {"teacher", "T IY1 CH ER0", true},
    {"yellow", "Y EH1 L OW0", true},
    {"river", "R IH1 V ER0", true},
    {"quietly", "K W AY1 AH0 T L IY0", true},
    {"music", "M Y UW1 Z IH0 K", true},
    {"window", "W IH1 N D OW0", true},
    {"happy", "HH AE1 P IY0", true},
    {"journey", "JH ER1 N IY0", true},
    {"village", "V IH1 L IH0 JH", true},
    {"thousand", "TH AW1 Z AH0 N D", true},
    {"brother", "B R AH1 DH ER0", true},
    {"carefully", "K EH1 R F AH0 L IY0", true},
    {"measure", "M EH1 ZH ER0", true},
    {"letter", "L EH1 T ER0", true},
    {"open", "OW1 P AH0 N", true},
    {"small", "S M AO1 L", true},
    {"boat", "B OW1 T", true},
    {"found", "F AW1 N D", true},
    {"bring", "B R IH1 NG", true},
    {"kitchen", "K IH1 CH AH0 N", true},
    {"yesterday", "Y EH1 S T ER0 D EY2", true},
    {"beautiful", "B Y UW1 T AH0 F AH0 L", true},
    {"table", "T EY1 B AH0 L", true},
    {"voice", "V OY1 S", true},
    {"people", "P IY1 P AH0 L", true},
    {"remember", "R IH0 M EH1 M B ER0", true},
    {"mountain", "M AW1 N T AH0 N", true},
};

const LexiconEntry& Find(std::string_view orthography) {
  for (const LexiconEntry& e : kLexicon) {
    if (e.orthography == orthography) return e;
  }
  throw Error("word not in lexicon: \"" + std::string(orthography) + "\"");
}

void AppendPronunciation(std::string_view pron, std::vector<Phoneme>& phonemes) {
  std::istringstream in{std::string(pron)};
  std::string token;
  while (in >> token) {
    Stress stress = Stress::kNone;
    const char last = token.back();
    if (last >= '0' && last <= '2') {
      stress = last == '1' ? Stress::kPrimary : last == '2' ? Stress::kSecondary : Stress::kNone;
      token.pop_back();
    }
    phonemes.push_back(Phoneme::Make(token, stress));
  }
}

// SplitMix64; the standard distributions are implementation-defined, so
// bounded draws use rejection on raw 64-bit output instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t Next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, n).
  uint64_t Below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do x = Next(); while (x >= limit);
    return x % n;
  }

 private:
  uint64_t state_;
};

}  // namespace

std::span<const LexiconEntry> Lexicon() { return kLexicon; }

Utterance UtteranceFromWords(const std::vector<std::string>& words,
                             std::optional<std::size_t> target) {
  std::vector<Phoneme> phonemes;
  std::vector<Word> out;
  for (const std::string& w : words) {
    Word word;
    word.begin = phonemes.size();
    word.orthography = w;
    if (w == "<sil>" || w == "<sp>") {
      phonemes.push_back(Phoneme::Make(w == "<sil>" ? "SIL" : "SP"));
    } else {
      AppendPronunciation(Find(w).pronunciation, phonemes);
    }
    word.end = phonemes.size();
    std::optional<std::size_t> first, secondary;
    for (std::size_t p = word.begin; p < word.end; ++p) {
      if (!phonemes[p].is_vowel()) continue;
      if (!first) first = p;
      if (phonemes[p].stress() == Stress::kPrimary) {
        word.stressed_vowel = p;
        break;
      }
      if (phonemes[p].stress() == Stress::kSecondary && !secondary) secondary = p;
    }
    if (!word.stressed_vowel) word.stressed_vowel = secondary ? secondary : first;
    out.push_back(std::move(word));
  }
  return Utterance::Create(std::move(phonemes), std::move(out), target);
}

Utterance FixtureUtterance() {
  return UtteranceFromWords({"<sil>", "and", "it's", "traditionally", "one", "of", "the",
                             "experiences", "we", "naturally", "try", "to", "avoid", "<sil>"},
                            3);
}

Corpus GenerateCorpus(std::size_t n, uint64_t seed) {
  if (n == 0) throw Error("corpus size must be at least 1");
  std::vector<std::size_t> content, function;
  for (std::size_t i = 0; i < std::size(kLexicon); ++i) {
    (kLexicon[i].content ? content : function).push_back(i);
  }
  Rng rng(seed);
  Corpus corpus;
  corpus.reserve(n);
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t count = 4 + rng.Below(7);
    std::vector<std::size_t> picks;
    std::vector<bool> is_content;
    for (std::size_t i = 0; i < count; ++i) {
      // At least two content words so the target is never forced.
      const bool c = i < 2 || rng.Below(2) == 0;
      const auto& pool = c ? content : function;
      picks.push_back(pool[rng.Below(pool.size())]);
      is_content.push_back(c);
    }
    for (std::size_t i = count; i > 1; --i) {
      const std::size_t j = rng.Below(i);
      std::swap(picks[i - 1], picks[j]);
      std::swap(is_content[i - 1], is_content[j]);
    }
    std::vector<std::string> words{"<sil>"};
    std::vector<std::size_t> content_positions;
    const std::size_t pause_after = rng.Below(3) == 0 ? 1 + rng.Below(count - 1) : 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (pause_after != 0 && i == pause_after) words.push_back("<sp>");
      if (is_content[i]) content_positions.push_back(words.size());
      words.push_back(std::string(kLexicon[picks[i]].orthography));
    }
    words.push_back("<sil>");
    const std::size_t target = content_positions[rng.Below(content_positions.size())];
    char id[32];
    std::snprintf(id, sizeof id, "utt_%04zu", u);
    corpus.emplace_back(id, UtteranceFromWords(words, target));
  }
  return corpus;
}

void WriteCorpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [id, utt] : corpus) {
    const auto path = dir / (id + ".json");
    std::ofstream out(path, std::ios::binary);
    out << SerializeUtterance(utt);
    if (!out) throw Error("cannot write " + path.string());
  }
}

Corpus ReadCorpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error("corpus directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  Corpus corpus;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      corpus.emplace_back(path.stem().string(), ParseUtterance(buf.str()));
    } catch (const Error& e) {
      throw Error(path.filename().string() + ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace emph
