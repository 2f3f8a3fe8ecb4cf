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

#ifndef OSNIP_TRAINER_CHECKPOINT_H_
#define OSNIP_TRAINER_CHECKPOINT_H_

#include <string>

#include "osnip/diffmath/container.h"
#include "osnip/trainer/trainer.h"

namespace osnip::trainer {

inline constexpr int kCheckpointSchema = 1;

void SaveCheckpoint(const EncryptorTrainer& t, const std::string& path);
// Restores the trainer state in place; the trainer must have been created
// with the same predictor and corpus.
void LoadCheckpoint(EncryptorTrainer& t, const std::string& path);

nlohmann::json TrainConfigJson(const TrainConfig& c);
TrainConfig TrainConfigFromJson(const nlohmann::json& j);
nlohmann::json CurriculumJson(const objectives::CurriculumConfig& c);
objectives::CurriculumConfig CurriculumFromJson(const nlohmann::json& j);

}  // namespace osnip::trainer

#endif  // OSNIP_TRAINER_CHECKPOINT_H_
