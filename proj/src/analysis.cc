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

#include "emph/analysis.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "emph/error.h"
#include "emph/simd/kernels.h"
#include "json.hpp"

namespace emph {
namespace {

constexpr double kPi = 3.14159265358979323846;

using json = nlohmann::json;

double ToDb(double mean_square) {
  if (!(mean_square > 0.0)) return kIntensityFloorDb;
  return std::max(kIntensityFloorDb, 10.0 * std::log10(mean_square));
}

// Copy of w[begin, begin + len) with zeros outside the signal.
// Hann-windowed sinc low-pass with unit gain at DC.
std::vector<float> LowPass(const std::vector<float>& x, double sr, double cutoff_hz, int taps) {
  const int half = taps / 2;
  const double fc = cutoff_hz / sr;
  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double t = static_cast<double>(i);
    const double sinc = i == 0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * t) / (kPi * t);
    const double hann = 0.5 + 0.5 * std::cos(kPi * t / (half + 1));
    h[static_cast<std::size_t>(i + half)] = sinc * hann;
    sum += sinc * hann;
  }
  std::vector<float> taps_f(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) taps_f[i] = static_cast<float>(h[i] / sum);

  const long long n = static_cast<long long>(x.size());
  std::vector<float> padded(static_cast<std::size_t>(n + 2 * half), 0.0f);
  std::copy(x.begin(), x.end(), padded.begin() + half);
  std::vector<float> y(x.size());
  for (long long i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<float>(
        simd::Dot(std::span<const float>(padded.data() + i, taps_f.size()), taps_f));
  }
  return y;
}

void Window(const std::vector<float>& x, long long begin, long long len,
            std::vector<float>& out) {
  out.assign(static_cast<std::size_t>(len), 0.0f);
  const long long n = static_cast<long long>(x.size());
  const long long lo = std::max(0LL, begin);
  const long long hi = std::min(n, begin + len);
  for (long long i = lo; i < hi; ++i) out[static_cast<std::size_t>(i - begin)] = x[static_cast<std::size_t>(i)];
}

json Optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

F0Track EstimateF0(const Waveform& w, const AnalysisConfig& config) {
  F0Track track;
  const double sr = w.sample_rate;
  const long long hop = std::lround(config.pitch_hop_s * sr);
  const long long win = std::lround(config.pitch_window_s * sr);
  track.hop_s = static_cast<double>(hop) / sr;
  const long long n = static_cast<long long>(w.samples.size());
  if (n == 0) return track;

  const long long min_lag = static_cast<long long>(std::floor(sr / config.f0_max_hz));
  const long long max_lag = static_cast<long long>(std::ceil(sr / config.f0_min_hz));
  // Correlations are evaluated one lag beyond each end for interpolation.
  const long long span = win - (max_lag + 1);
  if (span <= 0 || min_lag < 2) throw Error("pitch window too short for the search range");

  std::optional<std::vector<float>> filtered;
  if (config.pitch_lowpass_hz > 0.0) {
    filtered = LowPass(w.samples, sr, config.pitch_lowpass_hz, config.pitch_lowpass_taps);
  }

  struct Candidate {
    double f0;
    double r;
    double score;
  };
  std::vector<std::vector<Candidate>> candidates;
  std::vector<float> frame;
  std::vector<double> r(static_cast<std::size_t>(max_lag + 2), 0.0);
  const long long n_frames = (n + hop - 1) / hop;
  for (long long k = 0; k < n_frames; ++k) {
    const long long center = k * hop + hop / 2;
    const long long begin = center - win / 2;
    Window(w.samples, begin, win, frame);
    F0Frame out;
    out.time_s = (static_cast<double>(center) + 0.5) / sr;
    std::vector<Candidate> cands;

    const double energy = simd::Dot(frame, frame);
    const double rms_db = ToDb(energy / static_cast<double>(win));
    if (rms_db >= config.energy_gate_db) {
      if (filtered) Window(*filtered, begin, win, frame);
      const std::span<const float> ref(frame.data(), static_cast<std::size_t>(span));
      const double e0 = simd::Dot(ref, ref);
      for (long long lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
        const std::span<const float> shifted(frame.data() + lag, static_cast<std::size_t>(span));
        const double el = simd::Dot(shifted, shifted);
        const double denom = std::sqrt(e0 * el);
        r[static_cast<std::size_t>(lag)] = denom > 0.0 ? simd::Dot(ref, shifted) / denom : 0.0;
      }
      double best = 0.0;
      for (long long lag = min_lag; lag <= max_lag; ++lag) {
        const double a = r[static_cast<std::size_t>(lag - 1)];
        const double b = r[static_cast<std::size_t>(lag)];
        const double c = r[static_cast<std::size_t>(lag + 1)];
        if (!(b >= a && b >= c) || b <= 0.0) continue;
        const double curvature = a - 2.0 * b + c;
        const double shift = curvature < 0.0 ? std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5) : 0.0;
        const double f0 = sr / (static_cast<double>(lag) + shift);
        if (f0 < config.f0_min_hz || f0 > config.f0_max_hz) continue;
        best = std::max(best, b);
        cands.push_back({f0, b, b + config.octave_cost * std::log2(f0 / config.f0_min_hz)});
      }
      out.correlation = best;
      if (best >= config.voicing_threshold) {
        std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.r > y.r; });
        if (cands.size() > static_cast<std::size_t>(config.max_candidates)) {
          cands.resize(static_cast<std::size_t>(config.max_candidates));
        }
      } else {
        cands.clear();
      }
    }
    candidates.push_back(std::move(cands));
    track.frames.push_back(out);
  }

  // Best path through each run of voiced frames.
  for (std::size_t start = 0; start < candidates.size();) {
    if (candidates[start].empty()) {
      ++start;
      continue;
    }
    std::size_t end = start;
    while (end < candidates.size() && !candidates[end].empty()) ++end;
    std::vector<std::vector<double>> total(end - start);
    std::vector<std::vector<std::size_t>> back(end - start);
    for (std::size_t t = start; t < end; ++t) {
      const auto& cur = candidates[t];
      auto& tot = total[t - start];
      auto& bk = back[t - start];
      tot.assign(cur.size(), 0.0);
      bk.assign(cur.size(), 0);
      for (std::size_t j = 0; j < cur.size(); ++j) {
        if (t == start) {
          tot[j] = cur[j].score;
          continue;
        }
        const auto& prev = candidates[t - 1];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < prev.size(); ++i) {
          const double v = total[t - 1 - start][i] -
                           config.octave_jump_cost * std::fabs(std::log2(cur[j].f0 / prev[i].f0));
          if (v > best) {
            best = v;
            bk[j] = i;
          }
        }
        tot[j] = best + cur[j].score;
      }
    }
    const auto& last = total.back();
    std::size_t pick = static_cast<std::size_t>(std::max_element(last.begin(), last.end()) - last.begin());
    for (std::size_t t = end; t-- > start;) {
      const Candidate& c = candidates[t][pick];
      track.frames[t].f0_hz = c.f0;
      track.frames[t].correlation = c.r;
      pick = back[t - start][pick];
    }
    start = end;
  }
  return track;
}

IntensityTrack Intensity(const Waveform& w, const AnalysisConfig& config) {
  IntensityTrack track;
  const double sr = w.sample_rate;
  const long long hop = std::lround(config.intensity_hop_s * sr);
  const long long win = std::lround(config.intensity_window_s * sr);
  track.hop_s = static_cast<double>(hop) / sr;
  const long long n = static_cast<long long>(w.samples.size());
  if (n == 0) return track;

  std::vector<float> weights(static_cast<std::size_t>(win));
  double weight_sum = 0.0;
  for (long long i = 0; i < win; ++i) {
    const double s = std::sin(std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(win));
    weights[static_cast<std::size_t>(i)] = static_cast<float>(s * s);
    weight_sum += weights[static_cast<std::size_t>(i)];
  }
  std::vector<float> frame;
  const long long n_frames = (n + hop - 1) / hop;
  track.db.reserve(static_cast<std::size_t>(n_frames));
  for (long long k = 0; k < n_frames; ++k) {
    const long long center = k * hop + hop / 2;
    Window(w.samples, center - win / 2, win, frame);
    track.db.push_back(ToDb(simd::WeightedEnergy(frame, weights) / weight_sum));
  }
  return track;
}

std::vector<TimeSegment> DetectSilences(const IntensityTrack& track, double threshold_db,
                                        double min_ms) {
  std::vector<TimeSegment> out;
  const std::size_t n = track.db.size();
  for (std::size_t i = 0; i < n;) {
    if (track.db[i] >= threshold_db) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && track.db[j] < threshold_db) ++j;
    const TimeSegment seg{static_cast<double>(i) * track.hop_s, static_cast<double>(j) * track.hop_s};
    if (seg.duration_ms() >= min_ms - 1e-9) out.push_back(seg);
    i = j;
  }
  return out;
}

std::string SerializeAlignment(const Alignment& a) {
  json words = json::array();
  for (const WordAlignment& wa : a.words) {
    json jw = {{"word_index", wa.word_index},
               {"orthography", wa.orthography},
               {"start_sample", wa.start_sample},
               {"end_sample", wa.end_sample},
               {"is_pause", wa.is_pause}};
    if (wa.stressed_vowel_sample) jw["stressed_vowel_sample"] = *wa.stressed_vowel_sample;
    words.push_back(std::move(jw));
  }
  return json{{"sample_rate", a.sample_rate}, {"words", std::move(words)}}.dump(2) + "\n";
}

Alignment ParseAlignment(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed alignment JSON: ") + e.what());
  }
  Alignment a;
  try {
    a.sample_rate = doc.value("sample_rate", kSampleRate);
    for (const json& jw : doc.at("words")) {
      WordAlignment wa;
      wa.word_index = jw.at("word_index").get<std::size_t>();
      wa.orthography = jw.value("orthography", "");
      wa.start_sample = jw.at("start_sample").get<long long>();
      wa.end_sample = jw.at("end_sample").get<long long>();
      wa.is_pause = jw.value("is_pause", false);
      if (jw.contains("stressed_vowel_sample") && !jw["stressed_vowel_sample"].is_null()) {
        wa.stressed_vowel_sample = jw["stressed_vowel_sample"].get<long long>();
      }
      a.words.push_back(std::move(wa));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("invalid alignment document: ") + e.what());
  }
  return a;
}

std::vector<WordAcousticReport> WordReport(const Waveform& w, const Alignment& alignment,
                                           const AnalysisConfig& config) {
  const long long n = static_cast<long long>(w.samples.size());
  long long previous_end = 0;
  for (const WordAlignment& wa : alignment.words) {
    if (wa.start_sample < previous_end || wa.end_sample <= wa.start_sample || wa.end_sample > n) {
      throw Error("alignment interval for word " + std::to_string(wa.word_index) +
                  " is out of range or overlaps its predecessor");
    }
    previous_end = wa.end_sample;
  }

  const double sr = w.sample_rate;
  const F0Track pitch = EstimateF0(w, config);
  const IntensityTrack level = Intensity(w, config);
  const std::vector<TimeSegment> silences =
      DetectSilences(level, config.silence_threshold_db, config.silence_min_ms);
  AnalysisConfig smooth = config;
  smooth.intensity_window_s = config.level_window_s;
  const IntensityTrack loudness = Intensity(w, smooth);

  std::vector<WordAcousticReport> out;
  for (const WordAlignment& wa : alignment.words) {
    WordAcousticReport r;
    r.word_index = wa.word_index;
    r.orthography = wa.orthography;
    r.is_pause = wa.is_pause;
    r.duration_ms = static_cast<double>(wa.end_sample - wa.start_sample) / sr * 1000.0;
    const double t0 = static_cast<double>(wa.start_sample) / sr;
    const double t1 = static_cast<double>(wa.end_sample) / sr;

    double sum = 0.0;
    int voiced = 0;
    for (std::size_t k = 0; k < pitch.frames.size(); ++k) {
      const double center = (static_cast<double>(k) + 0.5) * pitch.hop_s;
      if (center < t0 || center >= t1 || !pitch.frames[k].f0_hz) continue;
      const double f = *pitch.frames[k].f0_hz;
      sum += f;
      ++voiced;
      r.f0_min_hz = r.f0_min_hz ? std::min(*r.f0_min_hz, f) : f;
      r.f0_max_hz = r.f0_max_hz ? std::max(*r.f0_max_hz, f) : f;
    }
    if (voiced > 0) {
      r.f0_mean_hz = sum / voiced;
      r.f0_range_hz = *r.f0_max_hz - *r.f0_min_hz;
    }

    double energy = 0.0;
    int frames = 0;
    for (std::size_t k = 0; k < loudness.db.size(); ++k) {
      const double center = (static_cast<double>(k) + 0.5) * loudness.hop_s;
      if (center < t0 || center >= t1) continue;
      energy += std::pow(10.0, loudness.db[k] / 10.0);
      r.intensity_max_db = frames == 0 ? loudness.db[k] : std::max(r.intensity_max_db, loudness.db[k]);
      ++frames;
    }
    if (frames > 0) r.intensity_mean_db = ToDb(energy / frames);

    if (wa.stressed_vowel_sample) {
      const double onset = static_cast<double>(*wa.stressed_vowel_sample) / sr;
      const double reach = config.pre_stress_reach_ms / 1000.0;
      // Frame quantization can put the detected end one hop past the onset.
      for (const TimeSegment& s : silences) {
        if (s.end_s >= onset - reach && s.end_s <= onset + level.hop_s + 1e-9) {
          r.pre_stress_silence_ms = s.duration_ms();
        }
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string SerializeReports(const std::vector<WordAcousticReport>& reports) {
  json doc = json::array();
  for (const WordAcousticReport& r : reports) {
    doc.push_back({{"word_index", r.word_index},
                   {"orthography", r.orthography},
                   {"is_pause", r.is_pause},
                   {"duration_ms", r.duration_ms},
                   {"f0_mean_hz", Optional(r.f0_mean_hz)},
                   {"f0_min_hz", Optional(r.f0_min_hz)},
                   {"f0_max_hz", Optional(r.f0_max_hz)},
                   {"f0_range_hz", r.f0_range_hz},
                   {"intensity_mean_db", r.intensity_mean_db},
                   {"intensity_max_db", r.intensity_max_db},
                   {"pre_stress_silence_ms", r.pre_stress_silence_ms}});
  }
  return doc.dump(2) + "\n";
}

EmphasisGuess IdentifyEmphasis(const std::vector<WordAcousticReport>& reports,
                               const std::vector<WordAcousticReport>& baseline) {
  if (reports.size() != baseline.size()) {
    throw Error("report count " + std::to_string(reports.size()) +
                " does not match baseline count " + std::to_string(baseline.size()));
  }
  if (reports.empty()) throw Error("no word reports to compare");

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!reports[i].is_pause) candidates.push_back(i);
  }
  constexpr int kFeatures = 4;
  std::vector<std::array<double, kFeatures>> features;
  for (std::size_t i : candidates) {
    const auto& r = reports[i];
    const auto& b = baseline[i];
    features.push_back({r.duration_ms / b.duration_ms, r.f0_range_hz - b.f0_range_hz,
                        r.pre_stress_silence_ms - b.pre_stress_silence_ms,
                        r.intensity_max_db - b.intensity_max_db});
  }

  EmphasisGuess guess;
  guess.scores.assign(reports.size(), 0.0);
  const double m = static_cast<double>(candidates.size());
  for (int f = 0; f < kFeatures; ++f) {
    double mean = 0.0;
    for (const auto& v : features) mean += v[f];
    mean /= m;
    double var = 0.0;
    for (const auto& v : features) var += (v[f] - mean) * (v[f] - mean);
    const double sd = std::sqrt(var / m);
    if (!(sd > 1e-12)) continue;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      guess.scores[candidates[c]] += (features[c][f] - mean) / sd;
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i : candidates) {
    if (guess.scores[i] > best) {
      best = guess.scores[i];
      guess.word_index = i;
    }
    if (guess.scores[i] != 0.0) guess.detected = true;
  }
  // Uniform zero scores carry no information: fall back to word 0.
  if (!guess.detected) guess.word_index = 0;
  return guess;
}

}  // namespace emph
