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

// Optimization of the encryptor parameters through the frozen predictor.

#ifndef OSNIP_TRAINER_TRAINER_H_
#define OSNIP_TRAINER_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "osnip/diffmath/adam.h"
#include "osnip/diffmath/rng.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/objectives/curriculum.h"
#include "osnip/objectives/losses.h"
#include "osnip/toylm/corpus.h"
#include "osnip/toylm/predictor.h"

namespace osnip::trainer {

enum class Optimizer { kAdam, kSgd };

struct TrainConfig {
  double learning_rate = 3e-3;
  int64_t steps = 3000;
  int64_t batch_size = 16;   // windows per batch
  int64_t window = 32;       // tokens per window
  uint64_t seed = 42;
  int64_t keys_per_batch = 2;
  Optimizer optimizer = Optimizer::kAdam;
  int64_t checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::string checkpoint_dir;

  void Validate() const;
};

struct LogRow {
  int64_t step = 0;
  objectives::LossBreakdown loss;
};

struct TrainLog {
  std::vector<LogRow> rows;

  // Columns: step, util, priv, div, total, w_time, w_safe, lambda1_eff, lambda2_eff.
  std::string ToCsv() const;
};

// 1.4 * median of the row norms of the embedding table, by default.
double DiversityMargin(const Tensor& embeddings, double scale);

class EncryptorTrainer {
 public:
  // Throws ConfigError unless the predictor is frozen. A copy of the
  // predictor's parameter hash is kept and rechecked at every checkpoint.
  EncryptorTrainer(const toylm::PredictorModel& predictor, encryptor::EncryptorModel init,
                   const toylm::ToyCorpus& corpus, TrainConfig tcfg,
                   objectives::CurriculumConfig ccfg);

  // One optimization step. Throws NumericError naming the step on a
  // non-finite loss.
  const LogRow& Step();
  // Runs until `step()` reaches `until` (the configured total by default),
  // writing periodic checkpoints when configured.
  void Run(int64_t until = -1);

  int64_t step() const { return step_; }
  const encryptor::EncryptorModel& model() const { return enc_; }
  const TrainLog& log() const { return log_; }
  const TrainConfig& train_config() const { return tcfg_; }
  const objectives::CurriculumConfig& curriculum() const { return ccfg_; }

  // Throws Error if the predictor's parameters changed.
  void AssertPredictorFrozen() const;

  Container Checkpoint() const;
  void Restore(const Container& c);

 private:
  const toylm::PredictorModel& predictor_;
  encryptor::EncryptorModel enc_;
  const toylm::ToyCorpus& corpus_;
  TrainConfig tcfg_;
  objectives::CurriculumConfig ccfg_;
  std::vector<size_t> eligible_;
  Adam opt_;
  Rng rng_;
  objectives::GateState gate_;
  int64_t step_ = 0;
  TrainLog log_;
  std::string predictor_hash_;
};

struct TrainResult {
  encryptor::EncryptorModel model;
  TrainLog log;
};

TrainResult TrainEncryptor(const toylm::PredictorModel& predictor, const encryptor::EncryptorModel& init,
                           const toylm::ToyCorpus& corpus, const TrainConfig& tcfg,
                           const objectives::CurriculumConfig& ccfg);

}  // namespace osnip::trainer

#endif  // OSNIP_TRAINER_TRAINER_H_
