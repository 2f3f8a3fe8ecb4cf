// Copyright 2026 The OSNIP Lab Authors
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

#ifndef OSNIP_DIFFMATH_UTIL_H_
#define OSNIP_DIFFMATH_UTIL_H_

#include <cstdint>
#include <functional>
#include <string>

#include "osnip/diffmath/tensor.h"

namespace osnip {

std::string Sha256Hex(const std::string& bytes);
// Hash of shape and raw little-endian payload.
std::string HashTensor(const Tensor& t);

std::string ReadFile(const std::string& path);
// Writes through a temporary file and renames it into place.
void WriteFile(const std::string& path, const std::string& bytes);

// Worker cap for ParallelFor; 0 means hardware concurrency.
void SetMaxThreads(int n);
int MaxThreads();

// Runs fn(i) for i in [0, n). Each index must write only its own output
// slot, so results never depend on the thread count.
void ParallelFor(int64_t n, const std::function<void(int64_t)>& fn);

// Shortest round-trip decimal form of a double.
std::string FormatDouble(double v);

}  // namespace osnip

#endif  // OSNIP_DIFFMATH_UTIL_H_
