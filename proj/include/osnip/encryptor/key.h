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

#ifndef OSNIP_ENCRYPTOR_KEY_H_
#define OSNIP_ENCRYPTOR_KEY_H_

#include <array>
#include <cstdint>
#include <string>

#include "osnip/diffmath/rng.h"
#include "osnip/diffmath/tensor.h"

namespace osnip::encryptor {

// Opaque 256-bit secret.
struct SecretKey {
  std::array<uint32_t, 8> words{};

  static SecretKey Random(Rng& rng);
  static SecretKey FromHex(const std::string& hex);
  std::string Hex() const;

  bool operator==(const SecretKey& o) const { return words == o.words; }
  bool operator!=(const SecretKey& o) const { return words != o.words; }
};

// Unit-norm standard-normal vector drawn from a generator keyed by `key`.
Tensor ExpandKey(const SecretKey& key, int64_t d_k);

}  // namespace osnip::encryptor

#endif  // OSNIP_ENCRYPTOR_KEY_H_
