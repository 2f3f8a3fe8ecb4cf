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

// Binary container shared by every checkpoint:
//   magic "OSNIPCK1" | u32 version | u64 meta length | meta JSON |
//   u64 tensor count | per tensor: u32 name length, name, u32 rank,
//   u64 extents..., f64 payload | 32-byte SHA-256 of all preceding bytes.
// Integers and doubles are little-endian.

#ifndef OSNIP_DIFFMATH_CONTAINER_H_
#define OSNIP_DIFFMATH_CONTAINER_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "osnip/diffmath/autodiff.h"
#include "osnip/diffmath/tensor.h"

namespace osnip {

inline constexpr uint32_t kContainerVersion = 1;

struct Container {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor& Find(const std::string& name) const;
};

std::string SerializeContainer(const Container& c);
// Throws CorruptHeaderError, TruncatedError or VersionMismatchError.
Container ParseContainer(const std::string& bytes);

void SaveContainer(const Container& c, const std::string& path);
Container LoadContainer(const std::string& path);

// Adds every parameter as "<prefix><name>" with its trainable flag in meta.
void PackParams(const ParamStore& store, const std::string& prefix, Container& c);
ParamStore UnpackParams(const Container& c, const std::string& prefix);

}  // namespace osnip

#endif  // OSNIP_DIFFMATH_CONTAINER_H_
