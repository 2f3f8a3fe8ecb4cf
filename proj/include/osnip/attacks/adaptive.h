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

#ifndef OSNIP_ATTACKS_ADAPTIVE_H_
#define OSNIP_ATTACKS_ADAPTIVE_H_

#include <vector>

#include "osnip/attacks/report.h"
#include "osnip/diffmath/rng.h"
#include "osnip/encryptor/encryptor.h"

namespace osnip::attacks {

// Isotropic displacement with the given per-row norms: (g / ||g||) * norm.
Tensor RandomNoiseDelta(const Tensor& h, const std::vector<double>& reference_norms, Rng& rng);
// h projected after the random displacement, like the encryptor output.
Tensor RandomNoiseControl(const Tensor& h, const std::vector<double>& reference_norms, Rng& rng);

// The attacker holds the encryptor weights, encrypts every vocabulary row
// under its key guess and ranks rows by L2 distance. `instances[i]` is one
// perturbed sequence [T_i, d] encrypted under `true_keys[i]`. Random mode
// draws a fresh guess per instance from rng.Split(i).
AttackReport AdaptiveKeyAttack(const encryptor::EncryptorModel& enc, const Tensor& table,
                               const std::vector<Tensor>& instances,
                               const std::vector<std::vector<int64_t>>& true_ids,
                               const std::vector<encryptor::SecretKey>& true_keys, KeyMode mode,
                               const Rng& rng, const AttackConfig& cfg);

}  // namespace osnip::attacks

#endif  // OSNIP_ATTACKS_ADAPTIVE_H_
