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

// Clean versus encrypted utility, and the encrypted instance sets the
// privacy evaluations attack.

#ifndef OSNIP_EVALSUITE_UTILITY_H_
#define OSNIP_EVALSUITE_UTILITY_H_

#include <cstdint>
#include <vector>

#include "osnip/attacks/report.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/toylm/corpus.h"
#include "osnip/toylm/predictor.h"
#include "osnip/diffmath/rng.h"

namespace osnip::evalsuite {

// Key for sequence i, replica j: SecretKey::Random(rng.Split(i).Split(j)).
encryptor::SecretKey InstanceKey(const Rng& rng, size_t i, size_t j = 0);

struct UtilityReport {
  double clean_accuracy = 0.0;
  double encrypted_accuracy = 0.0;
  double retained_performance = 0.0;
  double clean_ppl = 0.0;
  double encrypted_ppl = 0.0;
  double ppl_ratio = 0.0;
  double kl_mean = 0.0;
  double kl_median = 0.0;
  // Token-level |cos(h, z)| statistics.
  double cos_abs_mean = 0.0;
  double cos_band_fraction = 0.0;  // |cos| <= band_limit
  double band_limit = 0.0;
  int64_t n_tokens = 0;
};

// A null encryptor evaluates the clean model on both sides. Sequence i is
// encrypted with InstanceKey(rng, i).
UtilityReport UtilityEval(const toylm::PredictorModel& predictor, const encryptor::EncryptorModel* enc,
                          const toylm::ToyCorpus& corpus, const Rng& rng, double band_limit);

// Per-token KL(f(h) || f(z)) over every position of the given sequences.
std::vector<double> TokenKl(const toylm::PredictorModel& predictor, const std::vector<Tensor>& clean,
                            const std::vector<Tensor>& perturbed);

struct InstanceSet {
  std::vector<Tensor> clean;      // h per instance
  std::vector<Tensor> perturbed;  // z per instance
  std::vector<std::vector<int64_t>> ids;
  std::vector<encryptor::SecretKey> keys;
  std::vector<int64_t> source;    // corpus index

  Tensor StackedPerturbed() const;
  std::vector<int64_t> StackedIds() const;
};

// The first `n_sequences` sequences, each encrypted under `replicas` keys.
InstanceSet BuildInstances(const toylm::PredictorModel& predictor, const encryptor::EncryptorModel* enc,
                           const toylm::ToyCorpus& corpus, int64_t n_sequences, int64_t replicas,
                           const Rng& rng);

}  // namespace osnip::evalsuite

#endif  // OSNIP_EVALSUITE_UTILITY_H_
