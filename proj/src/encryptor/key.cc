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

#include "osnip/encryptor/key.h"

#include <cmath>
#include <cstdio>

#include "osnip/diffmath/errors.h"

namespace osnip::encryptor {
namespace {

constexpr uint64_t kKeyStream = 0x6b6579;  // "key"

}  // namespace

SecretKey SecretKey::Random(Rng& rng) {
  SecretKey k;
  for (uint32_t& w : k.words) w = rng.NextU32();
  return k;
}

SecretKey SecretKey::FromHex(const std::string& hex) {
  if (hex.size() != 64) throw ConfigError("secret key must be 64 hex digits");
  SecretKey k;
  for (int i = 0; i < 8; ++i) {
    uint32_t w = 0;
    for (int j = 0; j < 8; ++j) {
      const char c = hex[i * 8 + j];
      uint32_t v;
      if (c >= '0' && c <= '9') {
        v = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        v = c - 'a' + 10;
      } else if (c >= 'A' && c <= 'F') {
        v = c - 'A' + 10;
      } else {
        throw ConfigError("secret key has a non-hex digit");
      }
      w = (w << 4) | v;
    }
    k.words[i] = w;
  }
  return k;
}

std::string SecretKey::Hex() const {
  std::string s;
  char buf[9];
  for (uint32_t w : words) {
    std::snprintf(buf, sizeof(buf), "%08x", w);
    s += buf;
  }
  return s;
}

Tensor ExpandKey(const SecretKey& key, int64_t d_k) {
  if (d_k < 1) throw ConfigError("key dimension must be >= 1");
  Rng rng(key.words, kKeyStream);
  Tensor k({d_k});
  double s2;
  do {
    rng.FillNormal(k.data(), d_k);
    s2 = 0.0;
    for (double v : k.vec()) s2 += v * v;
  } while (s2 == 0.0);
  const double inv = 1.0 / std::sqrt(s2);
  for (double& v : k.vec()) v *= inv;
  return k;
}

}  // namespace osnip::encryptor
