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

// Frozen toy language model. Embeddings E (|V| x d) pass through an input
// projection P (d_model x d) and L residual blocks
//   x <- x + W2 tanh(W1 [x ; causal_mean(x)] + b1) + b2,
// then a vocabulary head U and a classification head on the sequence mean.

#ifndef OSNIP_TOYLM_PREDICTOR_H_
#define OSNIP_TOYLM_PREDICTOR_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "osnip/diffmath/autodiff.h"
#include "osnip/diffmath/container.h"
#include "osnip/diffmath/rng.h"
#include "osnip/toylm/corpus.h"

namespace osnip::toylm {

struct PredictorConfig {
  int64_t vocab_size = 256;
  int64_t embed_dim = 64;
  int64_t model_dim = 8;
  int64_t hidden = 64;
  int64_t layers = 2;
  int64_t num_classes = 4;

  void Validate() const;
};

struct PredictorModel {
  PredictorConfig config;
  ParamStore params;
  bool frozen = false;

  void Freeze();
  const Tensor& Embeddings() const { return params.Get("E"); }
};

PredictorModel InitPredictor(const PredictorConfig& cfg, Rng& rng);

// Hidden states: layer 0 is the input embedding; layer l >= 1 is block l's
// output. Rows of all sequences are stacked; `lengths` delimits sequences.
struct ForwardVars {
  ad::Var logits;        // [N, |V|]
  ad::Var class_logits;  // [segments, classes]
  std::vector<ad::Var> states;
};

ForwardVars Forward(const PredictorModel& m, const ad::Var& emb,
                    const std::vector<int64_t>& lengths);

// One block applied to states x with their causal context.
ad::Var Block(const PredictorModel& m, int64_t layer, const ad::Var& x, const ad::Var& ctx);
ad::Var InputProjection(const PredictorModel& m, const ad::Var& emb);

struct PredictorOutput {
  Tensor distribution;  // [T, |V|], rows are next-token distributions
  Tensor class_logits;  // [classes]
  std::vector<Tensor> hidden_states;
};

Tensor Embed(const PredictorModel& m, const std::vector<int64_t>& ids);
PredictorOutput Predict(const PredictorModel& m, const Tensor& embeddings);

// Maps a sequence's clean embeddings to what the server sees.
using EmbeddingTransform = std::function<Tensor(const Tensor& emb, size_t seq_index)>;

double Perplexity(const PredictorModel& m, const ToyCorpus& corpus,
                  const EmbeddingTransform& transform = nullptr);
double ClassificationAccuracy(const PredictorModel& m, const ToyCorpus& corpus,
                              const EmbeddingTransform& transform = nullptr);

std::string ParamHash(const ParamStore& params);

void PackPredictor(const PredictorModel& m, Container& c);
PredictorModel UnpackPredictor(const Container& c);

}  // namespace osnip::toylm

#endif  // OSNIP_TOYLM_PREDICTOR_H_
