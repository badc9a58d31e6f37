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

#include "emph/evalstats.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "emph/error.h"
#include "json.hpp"

namespace emph::stats {
namespace {

using json = nlohmann::json;

constexpr double kZ95 = 1.96;

// Series for the lower regularized gamma P(a, x), valid for x < a + 1.
double GammaPSeries(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
double GammaQContinuedFraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

std::vector<json> JsonLines(std::string_view text) {
  std::vector<json> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw Error("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    pos = end + 1;
  }
  return out;
}

}  // namespace

RatingsMatrix RatingsMatrix::Create(std::vector<std::string> systems,
                                    std::vector<std::string> listeners,
                                    std::vector<std::vector<double>> rows) {
  if (rows.empty() || systems.empty()) throw Error("ratings matrix is empty");
  if (listeners.empty()) {
    for (std::size_t i = 0; i < rows.size(); ++i) listeners.push_back("listener-" + std::to_string(i));
  }
  if (listeners.size() != rows.size()) throw Error("listener labels do not match rating rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != systems.size()) {
      throw Error("incomplete ratings for listener " + listeners[i]);
    }
    for (double v : rows[i]) {
      if (!(v >= 0.0 && v <= 100.0)) {
        throw Error("rating outside [0, 100] for listener " + listeners[i]);
      }
    }
  }
  RatingsMatrix m;
  m.systems_ = std::move(systems);
  m.listeners_ = std::move(listeners);
  m.rows_ = std::move(rows);
  return m;
}

std::vector<SystemSummary> MushraSummary(const RatingsMatrix& m) {
  std::vector<SystemSummary> out;
  const std::size_t n = m.n_listeners();
  for (std::size_t j = 0; j < m.n_systems(); ++j) {
    SystemSummary s;
    s.system = m.systems()[j];
    s.n = n;
    double sum = 0.0;
    for (const auto& row : m.rows()) sum += row[j];
    s.mean = sum / static_cast<double>(n);
    if (n > 1) {
      double ss = 0.0;
      for (const auto& row : m.rows()) ss += (row[j] - s.mean) * (row[j] - s.mean);
      s.sd = std::sqrt(ss / static_cast<double>(n - 1));
    } else {
      s.single_listener = true;
    }
    const double half = kZ95 * s.sd / std::sqrt(static_cast<double>(n));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> AverageRanks(std::span<const double> row) {
  const std::size_t k = row.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
  std::vector<double> ranks(k);
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i + 1;
    while (j < k && row[order[j]] == row[order[i]]) ++j;
    // Positions i..j-1 share ranks i+1..j.
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
    i = j;
  }
  return ranks;
}

FriedmanResult Friedman(const RatingsMatrix& m) {
  const std::size_t n = m.n_listeners();
  const std::size_t k = m.n_systems();
  if (n < 2 || k < 2) throw Error("Friedman test needs at least 2 listeners and 2 systems");
  FriedmanResult r;
  r.df = static_cast<int>(k - 1);
  r.rank_sums.assign(k, 0.0);
  double tie_sum = 0.0;
  for (const auto& row : m.rows()) {
    const auto ranks = AverageRanks(row);
    for (std::size_t j = 0; j < k; ++j) r.rank_sums[j] += ranks[j];
    std::vector<double> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < k;) {
      std::size_t j = i + 1;
      while (j < k && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_sum += t * t * t - t;
      i = j;
    }
  }
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double rj : r.rank_sums) sum_sq += rj * rj;
  const double raw = 12.0 / (dn * dk * (dk + 1.0)) * sum_sq - 3.0 * dn * (dk + 1.0);
  const double correction = 1.0 - tie_sum / (dn * dk * (dk * dk - 1.0));
  if (correction <= 1e-12) {
    r.q = 0.0;
    r.p = 1.0;
    return r;
  }
  r.q = std::max(0.0, raw / correction);
  r.p = ChiSquareUpperTail(r.q, r.df);
  return r;
}

double RegularizedGammaQ(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw Error("invalid incomplete gamma arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - GammaPSeries(a, x);
  return GammaQContinuedFraction(a, x);
}

double ChiSquareUpperTail(double x, int df) {
  if (df < 1) throw Error("chi-square needs at least one degree of freedom");
  if (x <= 0.0) return 1.0;
  return RegularizedGammaQ(0.5 * df, 0.5 * x);
}

double BinomialTwoSidedP(long long k, long long n) {
  if (n < 1 || k < 0 || k > n) throw Error("binomial test needs 0 <= k <= n and n >= 1");
  // pmf is symmetric at p = 1/2; compute the lower half and mirror so both
  // tails are bit-identical.
  std::vector<double> pmf(static_cast<std::size_t>(n + 1));
  const long long half = n / 2;
  if (n <= 1000) {
    double v = std::ldexp(1.0, static_cast<int>(-n));
    for (long long i = 0; i <= half; ++i) {
      pmf[static_cast<std::size_t>(i)] = v;
      v = v * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
  } else {
    const double log_half = std::log(0.5) * static_cast<double>(n);
    for (long long i = 0; i <= half; ++i) {
      pmf[static_cast<std::size_t>(i)] =
          std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + log_half);
    }
  }
  for (long long i = half + 1; i <= n; ++i) pmf[static_cast<std::size_t>(i)] = pmf[static_cast<std::size_t>(n - i)];
  const double observed = pmf[static_cast<std::size_t>(k)] * (1.0 + 1e-7);
  double p = 0.0;
  for (double v : pmf) {
    if (v <= observed) p += v;
  }
  return std::min(1.0, p);
}

PreferenceResult PreferenceDelta(const PreferenceTally& t) {
  if (t.votes_a < 0 || t.votes_b < 0) throw Error("negative vote count");
  const long long total = t.votes_a + t.votes_b;
  if (total < 1) throw Error("preference tally has no votes");
  PreferenceResult r;
  r.label_a = t.label_a;
  r.label_b = t.label_b;
  r.total = total;
  r.delta_pref = static_cast<double>(t.votes_a) / static_cast<double>(total) -
                 static_cast<double>(t.votes_b) / static_cast<double>(total);
  r.p = BinomialTwoSidedP(t.votes_a, total);
  return r;
}

IdentifiabilityResult Identifiability(std::span<const IdentifiabilityRecord> records) {
  if (records.empty()) throw Error("no identification records");
  IdentifiabilityResult r;
  for (const IdentifiabilityRecord& rec : records) {
    if (rec.word_count > 0 && (rec.target >= rec.word_count || rec.chosen >= rec.word_count)) {
      throw Error("word index outside utterance " + rec.utterance_id);
    }
    const bool hit = rec.chosen == rec.target;
    ++r.total;
    auto& g = r.by_system[rec.system];
    ++g.total;
    if (hit) {
      ++r.correct;
      ++g.correct;
    }
  }
  r.fraction = static_cast<double>(r.correct) / static_cast<double>(r.total);
  for (auto& [name, g] : r.by_system) {
    g.fraction = static_cast<double>(g.correct) / static_cast<double>(g.total);
  }
  return r;
}

RatingsMatrix ReadMushraJsonl(std::string_view text) {
  std::set<std::string> system_set;
  std::vector<std::pair<std::string, std::map<std::string, double>>> entries;
  for (const json& line : JsonLines(text)) {
    try {
      std::map<std::string, double> ratings;
      for (const auto& [system, value] : line.at("ratings").items()) {
        ratings[system] = value.get<double>();
        system_set.insert(system);
      }
      entries.emplace_back(line.at("listener").get<std::string>(), std::move(ratings));
    } catch (const json::exception& e) {
      throw Error(std::string("invalid MUSHRA response: ") + e.what());
    }
  }
  std::vector<std::string> systems(system_set.begin(), system_set.end());
  std::vector<std::string> listeners;
  std::vector<std::vector<double>> rows;
  for (const auto& [listener, ratings] : entries) {
    std::vector<double> row;
    for (const std::string& s : systems) {
      const auto it = ratings.find(s);
      if (it == ratings.end()) throw Error("incomplete ratings for listener " + listener);
      row.push_back(it->second);
    }
    listeners.push_back(listener);
    rows.push_back(std::move(row));
  }
  return RatingsMatrix::Create(std::move(systems), std::move(listeners), std::move(rows));
}

std::vector<PreferenceTally> ReadPreferenceJsonl(std::string_view text) {
  std::vector<PreferenceTally> tallies;
  for (const json& line : JsonLines(text)) {
    try {
      const auto& systems = line.at("systems");
      if (!systems.is_array() || systems.size() != 2) throw Error("preference response needs two systems");
      const std::string a = systems[0].get<std::string>();
      const std::string b = systems[1].get<std::string>();
      const std::string choice = line.at("choice").get<std::string>();
      if (choice != a && choice != b) throw Error("preference choice \"" + choice + "\" is not one of the pair");
      auto it = std::find_if(tallies.begin(), tallies.end(), [&](const PreferenceTally& t) {
        return (t.label_a == a && t.label_b == b) || (t.label_a == b && t.label_b == a);
      });
      if (it == tallies.end()) {
        tallies.push_back({a, b, 0, 0});
        it = tallies.end() - 1;
      }
      if (choice == it->label_a) {
        ++it->votes_a;
      } else {
        ++it->votes_b;
      }
    } catch (const json::exception& e) {
      throw Error(std::string("invalid preference response: ") + e.what());
    }
  }
  return tallies;
}

std::vector<IdentifiabilityRecord> ReadIdentifyJsonl(std::string_view text) {
  std::vector<IdentifiabilityRecord> out;
  for (const json& line : JsonLines(text)) {
    try {
      IdentifiabilityRecord r;
      r.utterance_id = line.at("utterance").get<std::string>();
      r.listener_id = line.value("listener", "");
      r.system = line.value("system", "");
      r.word_count = line.value("word_count", std::size_t{0});
      r.target = line.at("target").get<std::size_t>();
      r.chosen = line.at("chosen").get<std::size_t>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(std::string("invalid identification response: ") + e.what());
    }
  }
  return out;
}

std::string FormatPValue(double p) {
  if (p < 0.001) return "<0.001";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", p);
  return buf;
}

std::string FormatPercent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

std::string SummarizeJson(std::string_view test_type, std::string_view jsonl) {
  json doc = json::object();
  doc["test_type"] = std::string(test_type);
  if (test_type == "mushra") {
    const RatingsMatrix m = ReadMushraJsonl(jsonl);
    json systems = json::array();
    for (const SystemSummary& s : MushraSummary(m)) {
      systems.push_back({{"system", s.system}, {"n", s.n}, {"mean", s.mean}, {"sd", s.sd},
                         {"ci95_low", s.ci_low}, {"ci95_high", s.ci_high},
                         {"single_listener", s.single_listener}});
    }
    doc["systems"] = std::move(systems);
    if (m.n_listeners() >= 2 && m.n_systems() >= 2) {
      const FriedmanResult f = Friedman(m);
      doc["friedman"] = {{"q", f.q}, {"df", f.df}, {"p", f.p}, {"rank_sums", f.rank_sums}};
    }
  } else if (test_type == "preference") {
    json pairs = json::array();
    for (const PreferenceTally& t : ReadPreferenceJsonl(jsonl)) {
      const PreferenceResult r = PreferenceDelta(t);
      pairs.push_back({{"system_a", r.label_a}, {"system_b", r.label_b},
                       {"votes_a", t.votes_a}, {"votes_b", t.votes_b},
                       {"delta_pref", r.delta_pref}, {"p", r.p}});
    }
    doc["pairs"] = std::move(pairs);
  } else if (test_type == "identify") {
    const auto records = ReadIdentifyJsonl(jsonl);
    const IdentifiabilityResult r = Identifiability(records);
    json by_system = json::object();
    for (const auto& [name, g] : r.by_system) {
      by_system[name] = {{"total", g.total}, {"correct", g.correct}, {"fraction", g.fraction}};
    }
    doc["total"] = r.total;
    doc["correct"] = r.correct;
    doc["fraction"] = r.fraction;
    doc["by_system"] = std::move(by_system);
  } else {
    throw Error("unknown test type \"" + std::string(test_type) + "\"");
  }
  return doc.dump(2) + "\n";
}

std::string SummarizeTable(std::string_view test_type, std::string_view jsonl) {
  std::ostringstream out;
  char buf[160];
  if (test_type == "mushra") {
    const RatingsMatrix m = ReadMushraJsonl(jsonl);
    out << "System               Mean    95% CI\n";
    for (const SystemSummary& s : MushraSummary(m)) {
      std::snprintf(buf, sizeof(buf), "%-20s %5.1f   [%5.1f, %5.1f]\n", s.system.c_str(), s.mean,
                    s.ci_low, s.ci_high);
      out << buf;
    }
    if (m.n_listeners() >= 2 && m.n_systems() >= 2) {
      const FriedmanResult f = Friedman(m);
      std::snprintf(buf, sizeof(buf), "Friedman Q = %.3f, df = %d, p = %s\n", f.q, f.df,
                    FormatPValue(f.p).c_str());
      out << buf;
    }
  } else if (test_type == "preference") {
    out << "System A             System B             Delta Pref.  p-value\n";
    for (const PreferenceTally& t : ReadPreferenceJsonl(jsonl)) {
      const PreferenceResult r = PreferenceDelta(t);
      std::snprintf(buf, sizeof(buf), "%-20s %-20s %11s  %s\n", r.label_a.c_str(), r.label_b.c_str(),
                    FormatPercent(r.delta_pref).c_str(), FormatPValue(r.p).c_str());
      out << buf;
    }
  } else if (test_type == "identify") {
    const auto records = ReadIdentifyJsonl(jsonl);
    const IdentifiabilityResult r = Identifiability(records);
    out << "System               Identified\n";
    for (const auto& [name, g] : r.by_system) {
      std::snprintf(buf, sizeof(buf), "%-20s %9.0f%%\n", name.c_str(), g.fraction * 100.0);
      out << buf;
    }
  } else {
    throw Error("unknown test type \"" + std::string(test_type) + "\"");
  }
  return out.str();
}

}  // namespace emph::stats
