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

#include "osnip/diffmath/rng.h"

#include <cmath>
#include <numbers>

#include "osnip/diffmath/errors.h"

namespace osnip {
namespace {

inline uint32_t Rotl(uint32_t x, int n) { return (x << n) | (x >> (32 - n)); }

inline void QuarterRound(uint32_t& a, uint32_t& b, uint32_t& c, uint32_t& d) {
  a += b; d ^= a; d = Rotl(d, 16);
  c += d; b ^= c; b = Rotl(b, 12);
  a += b; d ^= a; d = Rotl(d, 8);
  c += d; b ^= c; b = Rotl(b, 7);
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void ChaCha20Block(const std::array<uint32_t, 8>& key,
                   const std::array<uint32_t, 4>& input,
                   std::array<uint32_t, 16>& out) {
  std::array<uint32_t, 16> s = {0x61707865, 0x3320646e, 0x79622d32, 0x6b206574,
                                key[0], key[1], key[2], key[3],
                                key[4], key[5], key[6], key[7],
                                input[0], input[1], input[2], input[3]};
  std::array<uint32_t, 16> x = s;
  for (int i = 0; i < 10; ++i) {
    QuarterRound(x[0], x[4], x[8], x[12]);
    QuarterRound(x[1], x[5], x[9], x[13]);
    QuarterRound(x[2], x[6], x[10], x[14]);
    QuarterRound(x[3], x[7], x[11], x[15]);
    QuarterRound(x[0], x[5], x[10], x[15]);
    QuarterRound(x[1], x[6], x[11], x[12]);
    QuarterRound(x[2], x[7], x[8], x[13]);
    QuarterRound(x[3], x[4], x[9], x[14]);
  }
  for (int i = 0; i < 16; ++i) out[i] = x[i] + s[i];
}

Rng::Rng(uint64_t seed, uint64_t stream) : stream_(stream) {
  key_[0] = static_cast<uint32_t>(seed);
  key_[1] = static_cast<uint32_t>(seed >> 32);
}

Rng::Rng(const Key& key, uint64_t stream) : key_(key), stream_(stream) {}

Rng Rng::Split(uint64_t child) const {
  return Rng(key_, SplitMix64(stream_ ^ SplitMix64(child + 1)));
}

void Rng::Refill() {
  const uint64_t blk = position_ >> 4;
  if (blk == cached_block_) return;
  const std::array<uint32_t, 4> in = {
      static_cast<uint32_t>(blk), static_cast<uint32_t>(blk >> 32),
      static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
  ChaCha20Block(key_, in, block_);
  cached_block_ = blk;
}

uint32_t Rng::NextU32() {
  Refill();
  const uint32_t v = block_[position_ & 15];
  ++position_;
  return v;
}

uint64_t Rng::NextU64() {
  const uint64_t lo = NextU32();
  const uint64_t hi = NextU32();
  return lo | (hi << 32);
}

double Rng::Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

double Rng::UniformOpen() {
  return (static_cast<double>(NextU64() >> 12) + 0.5) * 0x1.0p-52;
}

uint64_t Rng::UniformInt(uint64_t n) {
  if (n == 0) throw ConfigError("UniformInt: empty range");
  const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
  uint64_t v;
  do {
    v = NextU64();
  } while (v >= limit);
  return v % n;
}

double Rng::Normal() {
  const double u1 = UniformOpen();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void Rng::FillNormal(double* out, int64_t n) {
  int64_t i = 0;
  for (; i + 1 < n; i += 2) {
    const double u1 = UniformOpen();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    out[i] = r * std::cos(a);
    out[i + 1] = r * std::sin(a);
  }
  if (i < n) out[i] = Normal();
}

std::vector<uint64_t> Rng::State() const {
  std::vector<uint64_t> s;
  for (uint32_t w : key_) s.push_back(w);
  s.push_back(stream_);
  s.push_back(position_);
  return s;
}

Rng Rng::FromState(const std::vector<uint64_t>& state) {
  if (state.size() != 10) throw IoError("rng state must have 10 words");
  Key k{};
  for (int i = 0; i < 8; ++i) {
    if (state[i] > 0xffffffffULL) throw IoError("rng key word out of range");
    k[i] = static_cast<uint32_t>(state[i]);
  }
  Rng r(k, state[8]);
  r.position_ = state[9];
  return r;
}

}  // namespace osnip
