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

#ifndef EMPH_NUMERIC_H_
#define EMPH_NUMERIC_H_

#include <cmath>
#include <cstdint>

namespace emph {

// ceil(factor * value) for a positive integer value, immune to the binary
// representation of factor: 1.1 * 10 evaluates to 11.000000000000002 in
// double, and the mathematically intended result is 11, not 12. Products
// within a relative 1e-9 of an integer snap to it. A factor above one always
// yields at least value + 1.
inline int64_t CeilScaled(int64_t value, double factor) {
  const double product = factor * static_cast<double>(value);
  const double nearest = std::round(product);
  int64_t result;
  if (std::fabs(product - nearest) <= 1e-9 * std::fabs(product)) {
    result = static_cast<int64_t>(nearest);
  } else {
    result = static_cast<int64_t>(std::ceil(product));
  }
  if (factor > 1.0 && value > 0 && result < value + 1) result = value + 1;
  return result;
}

// floor(x + 0.5).
inline int64_t RoundHalfUp(double x) {
  return static_cast<int64_t>(std::floor(x + 0.5));
}

}  // namespace emph

#endif  // EMPH_NUMERIC_H_
