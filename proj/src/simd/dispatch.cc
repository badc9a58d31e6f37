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

#include <cstdlib>
#include <cstring>

#include "emph/simd/kernels.h"

namespace emph::simd {
namespace {

bool CpuHasAvx2() {
#if defined(EMPH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels& Resolve() {
  const char* forced = std::getenv("EMPH_SIMD");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    return internal::kScalarKernels;
  }
  if (const Kernels* k = ForIsa(Isa::kAvx2)) return *k;
  if (const Kernels* k = ForIsa(Isa::kNeon)) return *k;
  return internal::kScalarKernels;
}

}  // namespace

const Kernels& Active() {
  static const Kernels& active = Resolve();
  return active;
}

const Kernels* ForIsa(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &internal::kScalarKernels;
    case Isa::kAvx2:
#if defined(EMPH_HAVE_AVX2)
      if (CpuHasAvx2()) return &internal::kAvx2Kernels;
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(EMPH_HAVE_NEON)
      return &internal::kNeonKernels;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<const Kernels*> Available() {
  std::vector<const Kernels*> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (const Kernels* k = ForIsa(isa)) out.push_back(k);
  }
  return out;
}

}  // namespace emph::simd
