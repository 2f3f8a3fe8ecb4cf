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

// Key-conditioned perturbation network with iso-norm output projection.
// Per token: x = [h/||h|| ; k], delta = ||h|| * MLP(x), z = project(h, delta).

#ifndef OSNIP_ENCRYPTOR_ENCRYPTOR_H_
#define OSNIP_ENCRYPTOR_ENCRYPTOR_H_

#include <cstdint>

#include "osnip/diffmath/autodiff.h"
#include "osnip/diffmath/container.h"
#include "osnip/diffmath/rng.h"
#include "osnip/encryptor/key.h"

namespace osnip::encryptor {

struct EncryptorConfig {
  int64_t dim = 64;
  int64_t key_dim = 16;
  int64_t hidden = 128;
  int64_t depth = 2;  // hidden tanh layers

  void Validate() const;
};

struct EncryptorModel {
  EncryptorConfig config;
  ParamStore params;
};

// Hidden layers use uniform(+-1/sqrt(fan_in)) weights and biases; the output
// layer starts at zero so the map begins as the identity.
EncryptorModel InitEncryptor(const EncryptorConfig& cfg, Rng& rng);

// z = (h + delta) * ||h|| / ||h + delta||, row-wise. Throws on ||h|| = 0 or
// h + delta = 0.
Tensor Project(const Tensor& h, const Tensor& delta);

// h: [T, d] constant rows; key_emb: [d_k]. With `record`, trainable
// parameters enter the graph as gradient leaves.
ad::Var EncryptVar(const EncryptorModel& m, const ad::Var& h, const Tensor& key_emb, bool record);

Tensor Encrypt(const EncryptorModel& m, const Tensor& h, const Tensor& key_emb);
Tensor Encrypt(const EncryptorModel& m, const Tensor& h, const SecretKey& key);

// The pre-projection perturbation delta for each row of h.
Tensor Perturbation(const EncryptorModel& m, const Tensor& h, const Tensor& key_emb);
Tensor Perturbation(const EncryptorModel& m, const Tensor& h, const SecretKey& key);

void PackEncryptor(const EncryptorModel& m, Container& c);
EncryptorModel UnpackEncryptor(const Container& c);

}  // namespace osnip::encryptor

#endif  // OSNIP_ENCRYPTOR_ENCRYPTOR_H_
