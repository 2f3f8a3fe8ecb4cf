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

#ifndef OSNIP_ATTACKS_KNN_H_
#define OSNIP_ATTACKS_KNN_H_

#include <cstdint>
#include <vector>

#include "osnip/attacks/report.h"
#include "osnip/diffmath/tensor.h"

namespace osnip::attacks {

// Rank of the true row among all table rows by L2 distance to each query
// (0 = nearest). Rows at equal distance with a lower id rank ahead.
std::vector<int64_t> KnnRanks(const Tensor& table, const Tensor& queries,
                              const std::vector<int64_t>& true_ids);

// Top-k success: rank < k.
AttackReport KnnAttack(const Tensor& table, const Tensor& perturbed,
                       const std::vector<int64_t>& true_ids, const AttackConfig& cfg);

AttackReport ReportFromRanks(const std::vector<int64_t>& ranks, const AttackConfig& cfg,
                             const char* attack);

}  // namespace osnip::attacks

#endif  // OSNIP_ATTACKS_KNN_H_
