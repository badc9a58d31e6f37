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

#ifndef EMPH_ERROR_H_
#define EMPH_ERROR_H_

#include <stdexcept>
#include <string>

namespace emph {

// Raised for any contract violation on input data: malformed files, values
// out of range, inconsistent lengths. The message names the location.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace emph

#endif  // EMPH_ERROR_H_
