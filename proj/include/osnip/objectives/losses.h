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

#ifndef OSNIP_OBJECTIVES_LOSSES_H_
#define OSNIP_OBJECTIVES_LOSSES_H_

#include <cstdint>
#include <vector>

#include "osnip/diffmath/autodiff.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/objectives/curriculum.h"
#include "osnip/toylm/predictor.h"

namespace osnip::objectives {

// KL(p || q) with q floored at 1e-300. Throws NumericError unless both are
// distributions (nonnegative, sum 1 within 1e-9).
double LossUtil(const Tensor& p, const Tensor& q, bool* floored = nullptr);
// max(0, |cos(h, z)| - eps); throws on a zero vector.
double LossPriv(const Tensor& h, const Tensor& z, double eps);
// max(0, margin - ||z1 - z2||).
double LossDiv(const Tensor& z1, const Tensor& z2, double margin);

// Row-wise graph forms, each mean-reduced over rows.
ad::Var UtilVar(const Tensor& clean_log_probs, const ad::Var& logits);
ad::Var PrivVar(const Tensor& h, const ad::Var& z, double eps);
ad::Var DivVar(const ad::Var& z1, const ad::Var& z2, double margin);

struct LossBreakdown {
  double util = 0.0;
  double priv = 0.0;
  double div = 0.0;
  double total = 0.0;
  double eff_lambda1 = 0.0;
  double eff_lambda2 = 0.0;
  double w_time = 0.0;
  double w_safe = 0.0;
  bool floored = false;
};

struct TotalLossResult {
  ad::Var total;
  LossBreakdown breakdown;
};

// h: clean embeddings of the batch windows, stacked [N, d]; lengths gives the
// window sizes. util and priv average over the key outputs, div over all
// key pairs. `gate` may be null (instantaneous gating). When `rows` is given,
// h holds distinct embeddings and the batch is h[rows]; each distinct row is
// encrypted once.
TotalLossResult TotalLoss(const toylm::PredictorModel& predictor,
                          const encryptor::EncryptorModel& enc, const Tensor& h,
                          const std::vector<int64_t>& lengths, const std::vector<Tensor>& key_embs,
                          int64_t step, const CurriculumConfig& cfg, GateState* gate = nullptr,
                          const std::vector<int64_t>* rows = nullptr);

}  // namespace osnip::objectives

#endif  // OSNIP_OBJECTIVES_LOSSES_H_
