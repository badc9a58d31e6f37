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

#ifndef EMPH_EVALSTATS_H_
#define EMPH_EVALSTATS_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Statistics for the three listening-test protocols: MUSHRA ratings,
// forced-choice preference and emphasized-word identification.
namespace emph::stats {

// n_listeners x k_systems ratings in [0, 100], no missing cells.
class RatingsMatrix {
 public:
  static RatingsMatrix Create(std::vector<std::string> systems,
                              std::vector<std::string> listeners,
                              std::vector<std::vector<double>> rows);

  const std::vector<std::string>& systems() const { return systems_; }
  const std::vector<std::string>& listeners() const { return listeners_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t n_listeners() const { return rows_.size(); }
  std::size_t n_systems() const { return systems_.size(); }

 private:
  std::vector<std::string> systems_;
  std::vector<std::string> listeners_;
  std::vector<std::vector<double>> rows_;
};

struct SystemSummary {
  std::string system;
  std::size_t n = 0;
  double mean = 0.0;
  // Sample standard deviation; 0 by convention for a single listener.
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool single_listener = false;
};

// Column means with normal-approximation 95% intervals.
std::vector<SystemSummary> MushraSummary(const RatingsMatrix& m);

struct FriedmanResult {
  double q = 0.0;
  int df = 0;
  double p = 1.0;
  std::vector<double> rank_sums;
};

// Rank-based test across systems with tie-corrected statistic and
// chi-square(k - 1) upper-tail p-value.
FriedmanResult Friedman(const RatingsMatrix& m);

// Average ranks (1-based) of one row; ties share their mean rank.
std::vector<double> AverageRanks(std::span<const double> row);

// Regularized upper incomplete gamma Q(a, x).
double RegularizedGammaQ(double a, double x);
double ChiSquareUpperTail(double x, int df);

struct PreferenceTally {
  std::string label_a;
  std::string label_b;
  long long votes_a = 0;
  long long votes_b = 0;
};

struct PreferenceResult {
  std::string label_a;
  std::string label_b;
  long long total = 0;
  // Fraction preferring A minus fraction preferring B.
  double delta_pref = 0.0;
  double p = 1.0;
};

PreferenceResult PreferenceDelta(const PreferenceTally& t);

// Exact two-sided binomial test of k successes in n trials against 1/2:
// sum of the probabilities of all outcomes no more likely than k.
double BinomialTwoSidedP(long long k, long long n);

struct IdentifiabilityRecord {
  std::string utterance_id;
  std::string listener_id;
  std::string system;
  std::size_t word_count = 0;
  std::size_t target = 0;
  std::size_t chosen = 0;
};

struct IdentifiabilityResult {
  std::size_t total = 0;
  std::size_t correct = 0;
  double fraction = 0.0;
  struct Group {
    std::size_t total = 0;
    std::size_t correct = 0;
    double fraction = 0.0;
  };
  std::map<std::string, Group> by_system;
};

IdentifiabilityResult Identifiability(std::span<const IdentifiabilityRecord> records);

// JSONL readers, one response per line. Blank lines are skipped.
//   mushra:     {"listener": ID, "ratings": {system: value, ...}}
//   preference: {"listener": ID, "systems": [A, B], "choice": A|B}
//   identify:   {"utterance": ID, "listener": ID, "system": S,
//                "word_count": N, "target": i, "chosen": j}
RatingsMatrix ReadMushraJsonl(std::string_view text);
std::vector<PreferenceTally> ReadPreferenceJsonl(std::string_view text);
std::vector<IdentifiabilityRecord> ReadIdentifyJsonl(std::string_view text);

// JSON summary document for a test type ("mushra", "preference", "identify")
// computed from its JSONL responses.
std::string SummarizeJson(std::string_view test_type, std::string_view jsonl);

// Plain-text table in the layout of a results table.
std::string SummarizeTable(std::string_view test_type, std::string_view jsonl);

// "<0.001" below one in a thousand, otherwise three decimals.
std::string FormatPValue(double p);
// Signed percentage with one decimal, e.g. "22.6%".
std::string FormatPercent(double fraction);

}  // namespace emph::stats

#endif  // EMPH_EVALSTATS_H_
