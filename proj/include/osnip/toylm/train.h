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

#ifndef OSNIP_TOYLM_TRAIN_H_
#define OSNIP_TOYLM_TRAIN_H_

#include <cstdint>
#include <vector>

#include "osnip/toylm/corpus.h"
#include "osnip/toylm/predictor.h"

namespace osnip::toylm {

struct PredictorTrainConfig {
  int64_t steps = 1500;
  int64_t batch_size = 8;
  double learning_rate = 3e-3;
  uint64_t seed = 42;
};

struct PredictorTrainResult {
  PredictorModel model;
  std::vector<double> losses;
};

// Next-token cross-entropy plus sequence classification cross-entropy.
// Returns a frozen model; NaN losses raise NumericError naming the step.
PredictorTrainResult TrainPredictor(const ToyCorpus& train, const PredictorConfig& cfg,
                                    const PredictorTrainConfig& tcfg);

}  // namespace osnip::toylm

#endif  // OSNIP_TOYLM_TRAIN_H_
