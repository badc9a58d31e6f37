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

#include <arm_neon.h>

#include "emph/simd/kernels.h"

namespace emph::simd {
namespace {

double DotNeon(const float* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)),
                     vcvt_f64_f32(vget_low_f32(vb)));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double WeightedEnergyNeon(const float* x, const float* w, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vcvt_f64_f32(vld1_f32(x + i));
    const float64x2_t vw = vcvt_f64_f32(vld1_f32(w + i));
    acc = vfmaq_f64(acc, vmulq_f64(vx, vx), vw);
  }
  double sum = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double v = x[i];
    sum += v * v * static_cast<double>(w[i]);
  }
  return sum;
}

void ScaleNeon(float* x, std::size_t n, double gain) {
  const float64x2_t g = vdupq_n_f64(gain);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vcvt_f64_f32(vld1_f32(x + i));
    vst1_f32(x + i, vcvt_f32_f64(vmulq_f64(v, g)));
  }
  for (; i < n; ++i) {
    x[i] = static_cast<float>(static_cast<double>(x[i]) * gain);
  }
}

void MultiplyAccumulateNeon(float* y, const float* x, const float* w,
                            std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t p = vmulq_f32(vld1q_f32(x + i), vld1q_f32(w + i));
    vst1q_f32(y + i, vaddq_f32(vld1q_f32(y + i), p));
  }
  for (; i < n; ++i) {
    const float p = x[i] * w[i];
    y[i] = y[i] + p;
  }
}

}  // namespace

namespace internal {
const Kernels kNeonKernels = {Isa::kNeon, "neon", DotNeon, WeightedEnergyNeon,
                              ScaleNeon, MultiplyAccumulateNeon};
}  // namespace internal

}  // namespace emph::simd
