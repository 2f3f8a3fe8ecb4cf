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

#include "osnip/attacks/adaptive.h"

#include <cmath>

#include "osnip/attacks/knn.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"

namespace osnip::attacks {

Tensor RandomNoiseDelta(const Tensor& h, const std::vector<double>& reference_norms, Rng& rng) {
  const Tensor hm = h.rank() == 1 ? h.Reshaped({1, h.size()}) : h;
  if (static_cast<int64_t>(reference_norms.size()) != hm.rows()) {
    throw ShapeError("one reference norm per row required");
  }
  const int64_t d = hm.cols();
  Tensor delta(hm.shape());
  for (int64_t i = 0; i < hm.rows(); ++i) {
    const double norm = reference_norms[i];
    if (!(norm >= 0.0) || !std::isfinite(norm)) throw ConfigError("reference norm must be >= 0");
    double* g = delta.data() + i * d;
    double s2;
    do {
      rng.FillNormal(g, d);
      s2 = 0.0;
      for (int64_t j = 0; j < d; ++j) s2 += g[j] * g[j];
    } while (s2 == 0.0);
    const double scale = norm / std::sqrt(s2);
    for (int64_t j = 0; j < d; ++j) g[j] *= scale;
  }
  return delta.Reshaped(h.shape());
}

Tensor RandomNoiseControl(const Tensor& h, const std::vector<double>& reference_norms, Rng& rng) {
  return encryptor::Project(h, RandomNoiseDelta(h, reference_norms, rng));
}

AttackReport AdaptiveKeyAttack(const encryptor::EncryptorModel& enc, const Tensor& table,
                               const std::vector<Tensor>& instances,
                               const std::vector<std::vector<int64_t>>& true_ids,
                               const std::vector<encryptor::SecretKey>& true_keys, KeyMode mode,
                               const Rng& rng, const AttackConfig& cfg) {
  if (mode == KeyMode::kNone) throw ConfigError("adaptive attack needs key mode random or oracle");
  if (instances.size() != true_ids.size() || instances.size() != true_keys.size()) {
    throw ShapeError("adaptive attack needs ids and a key per instance");
  }
  if (instances.empty()) throw ConfigError("adaptive attack on an empty instance set");
  const int64_t n = static_cast<int64_t>(instances.size());
  std::vector<std::vector<int64_t>> ranks(n);
  ParallelFor(n, [&](int64_t i) {
    encryptor::SecretKey guess = true_keys[i];
    if (mode == KeyMode::kRandom) {
      Rng r = rng.Split(static_cast<uint64_t>(i));
      guess = encryptor::SecretKey::Random(r);
    }
    const Tensor encrypted_vocab = encryptor::Encrypt(enc, table, guess);
    ranks[i] = KnnRanks(encrypted_vocab, instances[i], true_ids[i]);
  });
  std::vector<int64_t> all;
  for (const auto& r : ranks) all.insert(all.end(), r.begin(), r.end());
  AttackReport rep = ReportFromRanks(all, cfg, mode == KeyMode::kOracle ? "adaptive-oracle" : "adaptive-random");
  return rep;
}

}  // namespace osnip::attacks
