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


#ifndef EMPH_CORPUS_H_
#define EMPH_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emph/phonology.h"

namespace emph {

struct LexiconEntry {
  std::string_view orthography;
  // Space-separated ARPAbet with stress digits on vowels, e.g. "T R AY1".
  std::string_view pronunciation;
  bool content;
};

std::span<const LexiconEntry> Lexicon();

// Builds an utterance from orthographic words found in the lexicon.
// "<sil>" and "<sp>" insert pause pseudo-words.
Utterance UtteranceFromWords(const std::vector<std::string>& words,
                             std::optional<std::size_t> target);

// "and it's traditionally one of the experiences we naturally try to avoid"
// with the emphasis on "traditionally".
Utterance FixtureUtterance();

using Corpus = std::vector<std::pair<std::string, Utterance>>;

// n utterances of 4 to 10 lexical words bracketed by silences, each with a
// content-word target. Throws when n is zero.
Corpus GenerateCorpus(std::size_t n, uint64_t seed);

// One <id>.json per utterance.
void WriteCorpus(const Corpus& corpus, const std::filesystem::path& dir);
// Reads every *.json in the directory in name order.
Corpus ReadCorpus(const std::filesystem::path& dir);

}  // namespace emph

#endif  // EMPH_CORPUS_H_
