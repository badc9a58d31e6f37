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

#include "emph/vocoder.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include "emph/error.h"
#include "emph/numeric.h"
#include "emph/simd/kernels.h"

namespace emph {
namespace {

constexpr int kHalf = kImpulseResponseLength / 2;  // 600
constexpr int kPulseHalfWidth = 16;
constexpr int kSpectrumBins = kHalf + 1;           // 0 .. Nyquist

// Cosine basis for the real inverse transform of a symmetric spectrum,
// weighted 1/N, 2/N, ..., 1/N. Row j evaluates lag j in [0, kHalf].
struct InverseBasis {
  std::vector<float> rows;
  std::vector<float> window;

  InverseBasis() : rows(static_cast<std::size_t>(kSpectrumBins) * kSpectrumBins) {
    const double n = kImpulseResponseLength;
    for (int j = 0; j <= kHalf; ++j) {
      for (int k = 0; k <= kHalf; ++k) {
        const double weight = (k == 0 || k == kHalf) ? 1.0 : 2.0;
        rows[static_cast<std::size_t>(j) * kSpectrumBins + k] = static_cast<float>(
            weight / n * std::cos(2.0 * std::numbers::pi * k * j / n));
      }
    }
    window.resize(kImpulseResponseLength);
    for (int i = 0; i < kImpulseResponseLength; ++i) {
      window[i] = static_cast<float>(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n));
    }
  }
};

const InverseBasis& Basis() {
  static const InverseBasis basis;
  return basis;
}

}  // namespace

long long FrameHops::total() const {
  return std::accumulate(hops.begin(), hops.end(), 0LL);
}

FrameHops MakeHops(std::size_t n_frames, std::optional<FrameRange> range,
                   double alpha_mel) {
  if (!(alpha_mel >= 1.0 && alpha_mel <= 1.5)) {
    throw Error("alpha_mel " + std::to_string(alpha_mel) + " outside [1.0, 1.5]");
  }
  FrameHops out;
  out.hops.assign(n_frames, kNominalHop);
  if (range) {
    if (range->begin > range->end || range->end > n_frames) {
      throw Error("hop range [" + std::to_string(range->begin) + ", " +
                  std::to_string(range->end) + ") outside " +
                  std::to_string(n_frames) + " frames");
    }
    const int stretched = static_cast<int>(CeilScaled(kNominalHop, alpha_mel));
    for (std::size_t i = range->begin; i < range->end; ++i) out.hops[i] = stretched;
  }
  return out;
}

std::vector<float> EnvelopeImpulseResponse(std::span<const float> mel_row) {
  const std::size_t bins = mel_row.size();
  const double mel_max = HzToMel(kSampleRate / 2.0);
  std::vector<float> spectrum(kSpectrumBins);
  for (int k = 0; k < kSpectrumBins; ++k) {
    const double hz = static_cast<double>(k) * kSampleRate / kImpulseResponseLength;
    double pos = HzToMel(hz) / mel_max * static_cast<double>(bins) - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(bins - 1));
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, bins - 1);
    const double frac = pos - static_cast<double>(lo);
    spectrum[k] = static_cast<float>((1.0 - frac) * mel_row[lo] + frac * mel_row[hi]);
  }

  const InverseBasis& basis = Basis();
  std::vector<float> ir(kImpulseResponseLength, 0.0f);
  for (int j = 0; j <= kHalf; ++j) {
    const std::span<const float> row(basis.rows.data() + static_cast<std::size_t>(j) * kSpectrumBins,
                                     kSpectrumBins);
    const double v = simd::Dot(row, spectrum);
    if (kHalf + j < kImpulseResponseLength) {
      ir[kHalf + j] = static_cast<float>(v * basis.window[kHalf + j]);
    }
    ir[kHalf - j] = static_cast<float>(v * basis.window[kHalf - j]);
  }
  return ir;
}

Waveform Vocode(const MelSpectrogram& mel, const FrameHops& hops,
                const VocoderConfig& config) {
  const std::size_t n_frames = mel.n_frames();
  if (hops.size() != n_frames) {
    throw Error("hop count " + std::to_string(hops.size()) + " does not match " +
                std::to_string(n_frames) + " mel frames");
  }
  if (mel.magnitudes.size() != n_frames * static_cast<std::size_t>(mel.n_bins)) {
    throw Error("mel magnitude count does not match its shape");
  }
  for (int h : hops.hops) {
    if (h < 1) throw Error("hop below one sample");
  }

  std::vector<long long> offsets(n_frames + 1, 0);
  for (std::size_t i = 0; i < n_frames; ++i) offsets[i + 1] = offsets[i] + hops.hops[i];
  const long long total = offsets[n_frames];
  const long long length = total + kNominalHop;

  Waveform out;
  out.samples.assign(static_cast<std::size_t>(length), 0.0f);
  if (n_frames == 0) return out;

  // Excitation signals over the output span plus filter margins. Index
  // e[kPad + n] holds output sample n.
  const long long max_hop = *std::max_element(hops.hops.begin(), hops.hops.end());
  const long long kPad = kImpulseResponseLength + max_hop;
  const std::size_t ex_len = static_cast<std::size_t>(length + 2 * kPad);
  std::vector<float> pulses(ex_len, 0.0f);
  std::vector<float> noise(ex_len, 0.0f);
  {
    std::mt19937 rng(config.noise_seed);
    const double half_width = std::sqrt(3.0);  // unit variance
    double phase = 1.0;
    std::size_t frame = 0;
    for (long long n = 0; n < length; ++n) {
      while (frame + 1 < n_frames && n >= offsets[frame + 1]) ++frame;
      const double u = static_cast<double>(rng()) / 4294967296.0;
      noise[static_cast<std::size_t>(kPad + n)] = static_cast<float>((2.0 * u - 1.0) * half_width);
      const double f0 = mel.f0_hz[frame];
      if (f0 > 0.0) {
        phase += f0 / kSampleRate;
        if (phase >= 1.0) {
          phase -= std::floor(phase);
          // Band-limited pulse at the exact crossing time.
          const double increment = f0 / kSampleRate;
          const double delay = phase / increment;
          const double amplitude = std::sqrt(kSampleRate / f0);
          for (int k = -kPulseHalfWidth; k <= kPulseHalfWidth; ++k) {
            const double t = delay - static_cast<double>(k);
            const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
            const double taper = 0.5 + 0.5 * std::cos(std::numbers::pi * t / (kPulseHalfWidth + 1));
            pulses[static_cast<std::size_t>(kPad + n - k)] += static_cast<float>(amplitude * sinc * taper);
          }
        }
      } else {
        phase = 1.0;
      }
    }
  }

  std::map<std::vector<float>, std::vector<float>> reversed_irs;
  std::vector<float> segment;
  std::vector<float> window;
  std::vector<bool> silent(n_frames, false);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const auto row = mel.row(i);
    if (std::all_of(row.begin(), row.end(), [](float v) { return v == 0.0f; })) {
      silent[i] = true;
      continue;
    }
    std::vector<float> key(row.begin(), row.end());
    auto it = reversed_irs.find(key);
    if (it == reversed_irs.end()) {
      std::vector<float> ir = EnvelopeImpulseResponse(row);
      std::reverse(ir.begin(), ir.end());
      it = reversed_irs.emplace(std::move(key), std::move(ir)).first;
    }
    const std::vector<float>& rev = it->second;
    const std::vector<float>& excitation = mel.f0_hz[i] > 0.0f ? pulses : noise;

    const long long hop = hops.hops[i];
    const long long seg_len = 2 * hop;
    const long long start = offsets[i] - hop / 2;
    segment.assign(static_cast<std::size_t>(seg_len), 0.0f);
    window.resize(static_cast<std::size_t>(seg_len));
    for (long long m = 0; m < seg_len; ++m) {
      const double s = std::sin(std::numbers::pi * (static_cast<double>(m) + 0.5) /
                                static_cast<double>(seg_len));
      window[static_cast<std::size_t>(m)] = static_cast<float>(s * s * config.output_gain);
      // y[n] = sum_k ir[k] * e[n + kHalf - k]
      const long long first = kPad + start + m - (kImpulseResponseLength - 1 - kHalf);
      segment[static_cast<std::size_t>(m)] = static_cast<float>(simd::Dot(
          rev, std::span<const float>(excitation.data() + first, kImpulseResponseLength)));
    }
    // Clip the segment to the output span before accumulating.
    const long long lo = std::max(0LL, start);
    const long long hi = std::min(length, start + seg_len);
    if (hi <= lo) continue;
    simd::MultiplyAccumulate(
        std::span<float>(out.samples.data() + lo, static_cast<std::size_t>(hi - lo)),
        std::span<const float>(segment.data() + (lo - start), static_cast<std::size_t>(hi - lo)),
        std::span<const float>(window.data() + (lo - start), static_cast<std::size_t>(hi - lo)));
  }

  for (std::size_t i = 0; i < n_frames; ++i) {
    if (!silent[i]) continue;
    std::fill(out.samples.begin() + offsets[i], out.samples.begin() + offsets[i + 1], 0.0f);
  }
  if (silent[n_frames - 1]) {
    std::fill(out.samples.begin() + total, out.samples.end(), 0.0f);
  }

  float peak = 0.0f;
  for (float v : out.samples) peak = std::max(peak, std::fabs(v));
  if (peak > 1.0f) {
    const double gain = kPeakTarget / peak;
    simd::Scale(out.samples, gain);
    out.peak_normalized = true;
    out.normalization_gain = gain;
  }
  return out;
}

Waveform MelEmph(const MelSpectrogram& mel, const Utterance& utt,
                 const DurationSequence& durations,
                 std::optional<std::size_t> word_index,
                 const MelEmphSettings& settings, const VocoderConfig& config,
                 FrameHops* hops_out) {
  if (!word_index) {
    FrameHops hops = MakeHops(mel.n_frames(), std::nullopt, 1.0);
    Waveform w = Vocode(mel, hops, config);
    if (hops_out) *hops_out = std::move(hops);
    return w;
  }
  const FrameRange range = FramesForWord(utt, durations, *word_index);
  const MelSpectrogram louder = ApplyMelEmphGain(mel, range, settings.v_mel);
  FrameHops hops = MakeHops(mel.n_frames(), range, settings.alpha_mel);
  Waveform w = Vocode(louder, hops, config);
  if (hops_out) *hops_out = std::move(hops);
  return w;
}

}  // namespace emph
