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

#ifndef OSNIP_DIFFMATH_RNG_H_
#define OSNIP_DIFFMATH_RNG_H_

#include <array>
#include <cstdint>
#include <vector>

namespace osnip {

// ChaCha20 block function. `input` holds the four counter/nonce words
// (state words 12..15).
void ChaCha20Block(const std::array<uint32_t, 8>& key,
                   const std::array<uint32_t, 4>& input,
                   std::array<uint32_t, 16>& out);

// Counter-based generator: a 256-bit key plus 128 bits of counter (64-bit
// block index, 64-bit stream id). Output depends only on (key, stream,
// position), so draws are identical on every platform.
class Rng {
 public:
  using Key = std::array<uint32_t, 8>;

  explicit Rng(uint64_t seed, uint64_t stream = 0);
  Rng(const Key& key, uint64_t stream);

  // Independent child stream; the parent is not advanced.
  Rng Split(uint64_t child) const;

  uint32_t NextU32();
  uint64_t NextU64();
  // [0, 1) with 53 random bits.
  double Uniform();
  // (0, 1).
  double UniformOpen();
  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n);
  double Normal();
  // Fills `out` using both Box-Muller outputs per pair of uniforms.
  void FillNormal(double* out, int64_t n);

  const Key& key() const { return key_; }
  uint64_t stream() const { return stream_; }
  uint64_t position() const { return position_; }

  // key words, stream, position; restores bit-exactly.
  std::vector<uint64_t> State() const;
  static Rng FromState(const std::vector<uint64_t>& state);

 private:
  void Refill();

  Key key_{};
  uint64_t stream_ = 0;
  uint64_t position_ = 0;  // 32-bit words consumed
  uint64_t cached_block_ = ~uint64_t{0};
  std::array<uint32_t, 16> block_{};
};

}  // namespace osnip

#endif  // OSNIP_DIFFMATH_RNG_H_
