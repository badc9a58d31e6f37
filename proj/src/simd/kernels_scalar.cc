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

#include "emph/simd/kernels.h"

namespace emph::simd {
namespace {

double DotScalar(const float* a, const float* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double WeightedEnergyScalar(const float* x, const float* w, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i];
    sum += v * v * static_cast<double>(w[i]);
  }
  return sum;
}

void ScaleScalar(float* x, std::size_t n, double gain) {
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<float>(static_cast<double>(x[i]) * gain);
  }
}

void MultiplyAccumulateScalar(float* y, const float* x, const float* w,
                              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float p = x[i] * w[i];
    y[i] = y[i] + p;
  }
}

}  // namespace

namespace internal {
const Kernels kScalarKernels = {Isa::kScalar, "scalar", DotScalar,
                                WeightedEnergyScalar, ScaleScalar,
                                MultiplyAccumulateScalar};
}  // namespace internal

}  // namespace emph::simd
