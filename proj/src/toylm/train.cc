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

#include "osnip/toylm/train.h"

#include <spdlog/spdlog.h>

#include <cmath>

#include "osnip/diffmath/adam.h"
#include "osnip/diffmath/errors.h"

namespace osnip::toylm {

PredictorTrainResult TrainPredictor(const ToyCorpus& train, const PredictorConfig& cfg,
                                    const PredictorTrainConfig& tcfg) {
  if (train.size() == 0) throw ConfigError("predictor training corpus is empty");
  if (tcfg.steps < 0 || tcfg.batch_size < 1) throw ConfigError("bad predictor training config");
  Rng init = Rng(tcfg.seed).Split(11);
  Rng rng = Rng(tcfg.seed).Split(12);
  PredictorTrainResult res{InitPredictor(cfg, init), {}};
  PredictorModel& m = res.model;
  Adam opt({.lr = tcfg.learning_rate});
  const int64_t v = cfg.vocab_size;
  for (int64_t step = 0; step < tcfg.steps; ++step) {
    std::vector<int64_t> ids, lengths;
    std::vector<size_t> picks;
    for (int64_t b = 0; b < tcfg.batch_size; ++b) {
      const size_t k = rng.UniformInt(train.size());
      picks.push_back(k);
      ids.insert(ids.end(), train.sequences[k].begin(), train.sequences[k].end());
      lengths.push_back(static_cast<int64_t>(train.sequences[k].size()));
    }
    const int64_t n = static_cast<int64_t>(ids.size());
    // Sparse targets as dense weights: -1/(B (T-1)) on each next token.
    Tensor tok_w({n, v});
    Tensor cls_w({tcfg.batch_size, cfg.num_classes});
    int64_t row = 0;
    for (int64_t b = 0; b < tcfg.batch_size; ++b) {
      const auto& s = train.sequences[picks[b]];
      const double w = -1.0 / (static_cast<double>(tcfg.batch_size) * static_cast<double>(s.size() - 1));
      for (size_t t = 0; t + 1 < s.size(); ++t) tok_w.at(row + t, s[t + 1]) = w;
      row += static_cast<int64_t>(s.size());
      cls_w.at(b, train.labels[picks[b]]) = -1.0 / static_cast<double>(tcfg.batch_size);
    }
    const ad::Var emb = ad::GatherRows(m.params.Var("E"), ids);
    const ForwardVars f = Forward(m, emb, lengths);
    const ad::Var loss =
        ad::Add(ad::Sum(ad::Mul(ad::LogSoftmaxRows(f.logits), ad::Constant(tok_w))),
                ad::Sum(ad::Mul(ad::LogSoftmaxRows(f.class_logits), ad::Constant(cls_w))));
    const double lv = loss->value.item();
    if (!std::isfinite(lv)) {
      throw NumericError("predictor training diverged at step " + std::to_string(step));
    }
    res.losses.push_back(lv);
    opt.Step(m.params, Grad(loss, m.params));
    if (step % 500 == 0) spdlog::debug("predictor step {} loss {:.4f}", step, lv);
  }
  m.Freeze();
  return res;
}

}  // namespace osnip::toylm
