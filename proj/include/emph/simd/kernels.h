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

#ifndef EMPH_SIMD_KERNELS_H_
#define EMPH_SIMD_KERNELS_H_

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel inner loops used by the synthesis and analysis code. Every
// kernel has a scalar reference implementation; vector variants are selected
// at runtime from what the CPU supports. Setting EMPH_SIMD=scalar in the
// environment forces the reference path.
namespace emph::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct Kernels {
  Isa isa;
  const char* name;
  // Sum of a[i] * b[i], accumulated in double.
  double (*dot)(const float* a, const float* b, std::size_t n);
  // Sum of w[i] * x[i]^2, accumulated in double.
  double (*weighted_energy)(const float* x, const float* w, std::size_t n);
  // x[i] = float(double(x[i]) * gain). Bit-identical across variants.
  void (*scale)(float* x, std::size_t n, double gain);
  // y[i] += x[i] * w[i] in float, no fused multiply-add. Bit-identical
  // across variants.
  void (*multiply_accumulate)(float* y, const float* x, const float* w,
                              std::size_t n);
};

// The variant chosen for this process. Resolved once.
const Kernels& Active();

// A specific variant, or nullptr when it was not compiled in or the CPU
// lacks the instructions.
const Kernels* ForIsa(Isa isa);

// All variants usable on this machine, scalar first.
std::vector<const Kernels*> Available();

inline double Dot(std::span<const float> a, std::span<const float> b) {
  return Active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline double WeightedEnergy(std::span<const float> x,
                             std::span<const float> w) {
  return Active().weighted_energy(x.data(), w.data(),
                                  x.size() < w.size() ? x.size() : w.size());
}

inline void Scale(std::span<float> x, double gain) {
  Active().scale(x.data(), x.size(), gain);
}

inline void MultiplyAccumulate(std::span<float> y, std::span<const float> x,
                               std::span<const float> w) {
  std::size_t n = y.size();
  if (x.size() < n) n = x.size();
  if (w.size() < n) n = w.size();
  Active().multiply_accumulate(y.data(), x.data(), w.data(), n);
}

namespace internal {
extern const Kernels kScalarKernels;
#if defined(EMPH_HAVE_AVX2)
extern const Kernels kAvx2Kernels;
#endif
#if defined(EMPH_HAVE_NEON)
extern const Kernels kNeonKernels;
#endif
}  // namespace internal

}  // namespace emph::simd

#endif  // EMPH_SIMD_KERNELS_H_
