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

#ifndef OSNIP_ATTACKS_VOCAB_H_
#define OSNIP_ATTACKS_VOCAB_H_

#include <cstdint>
#include <vector>

#include "osnip/attacks/report.h"
#include "osnip/toylm/predictor.h"

namespace osnip::attacks {

// Recovers each stream token by token: at step t every candidate v is
// appended to the attacker's recovered prefix, its layer-`cfg.layer` state is
// computed, and the candidate with the smallest L1 distance to the observed
// state wins (lowest id on ties). `observed[i]` holds the layer states the
// server sees for stream i, [T_i, width].
std::vector<int64_t> RecoverStream(const toylm::PredictorModel& predictor, const Tensor& observed,
                                   const AttackConfig& cfg);

// Streams are perturbed embeddings [T_i, d]; their layer states are computed
// with the predictor. Total ASR covers every position, clean ASR only
// positions whose true token is not a stop word.
AttackReport VocabMatchingAttack(const toylm::PredictorModel& predictor,
                                 const std::vector<Tensor>& perturbed_streams,
                                 const std::vector<std::vector<int64_t>>& true_ids,
                                 const std::vector<int64_t>& stop_words, const AttackConfig& cfg);

}  // namespace osnip::attacks

#endif  // OSNIP_ATTACKS_VOCAB_H_
