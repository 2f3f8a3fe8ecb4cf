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

#include "osnip/attacks/vocab.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"

namespace osnip::attacks {
namespace {

std::vector<int64_t> Candidates(const toylm::PredictorModel& m, const AttackConfig& cfg) {
  const int64_t v = m.config.vocab_size;
  if (cfg.candidates.empty()) {
    std::vector<int64_t> all(v);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<int64_t> c = cfg.candidates;
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (int64_t id : c) {
    if (id < 0 || id >= v) throw ConfigError("vocabulary candidate out of range");
  }
  return c;
}

int64_t NearestL1(const Tensor& cand, const double* obs, const std::vector<int64_t>& ids) {
  const int64_t w = cand.cols();
  int64_t best = 0;
  double best_d = INFINITY;
  for (int64_t r = 0; r < cand.rows(); ++r) {
    double s = 0.0;
    for (int64_t j = 0; j < w; ++j) s += std::fabs(cand.at(r, j) - obs[j]);
    if (s < best_d) {
      best_d = s;
      best = r;
    }
  }
  return ids[best];
}

}  // namespace

std::vector<int64_t> RecoverStream(const toylm::PredictorModel& m, const Tensor& observed,
                                   const AttackConfig& cfg) {
  const int64_t layer = cfg.layer;
  if (layer > m.config.layers) throw ConfigError("attack.layer exceeds the predictor depth");
  if (observed.rank() != 2 || observed.rows() < 1) throw ConfigError("empty attack stream");
  const int64_t width = layer == 0 ? m.config.embed_dim : m.config.model_dim;
  if (observed.cols() != width) throw ShapeError("observed states have the wrong width for this layer");

  const std::vector<int64_t> ids = Candidates(m, cfg);
  const int64_t nc = static_cast<int64_t>(ids.size());
  const Tensor emb = ops::GatherRows(m.Embeddings(), ids);
  std::vector<int64_t> out;
  if (layer == 0) {
    for (int64_t t = 0; t < observed.rows(); ++t) out.push_back(NearestL1(emb, observed.data() + t * width, ids));
    return out;
  }
  // Layer inputs of every candidate at the current position; prefix sums of
  // the recovered tokens' layer inputs provide the causal mean context.
  const Tensor x0 = ad::MatMulTransB(ad::Constant(emb), m.params.Var("P"))->value;
  const int64_t dm = m.config.model_dim;
  std::vector<Tensor> prefix(layer, Tensor({1, dm}));
  const std::vector<int64_t> one_each(nc, 1);
  for (int64_t t = 0; t < observed.rows(); ++t) {
    std::vector<Tensor> inputs;
    Tensor x = x0;
    for (int64_t l = 0; l < layer; ++l) {
      inputs.push_back(x);
      Tensor ctx;
      if (cfg.vocab_precomputed) {
        ctx = x;
      } else {
        ctx = ops::Scale(ops::AddRowVector(x, prefix[l].Reshaped({dm})), 1.0 / static_cast<double>(t + 1));
      }
      x = toylm::Block(m, l, ad::Constant(x), ad::Constant(ctx))->value;
    }
    const int64_t best = NearestL1(x, observed.data() + t * width, ids);
    out.push_back(best);
    const int64_t row = std::lower_bound(ids.begin(), ids.end(), best) - ids.begin();
    for (int64_t l = 0; l < layer; ++l) {
      for (int64_t j = 0; j < dm; ++j) prefix[l][j] += inputs[l].at(row, j);
    }
  }
  return out;
}

AttackReport VocabMatchingAttack(const toylm::PredictorModel& predictor,
                                 const std::vector<Tensor>& perturbed_streams,
                                 const std::vector<std::vector<int64_t>>& true_ids,
                                 const std::vector<int64_t>& stop_words, const AttackConfig& cfg) {
  cfg.Validate();
  if (perturbed_streams.empty()) throw ConfigError("vocabulary attack on an empty stream set");
  if (perturbed_streams.size() != true_ids.size()) throw ShapeError("one id list per stream required");
  if (cfg.layer > predictor.config.layers) throw ConfigError("attack.layer exceeds the predictor depth");
  const std::set<int64_t> stop(stop_words.begin(), stop_words.end());
  const int64_t ns = static_cast<int64_t>(perturbed_streams.size());
  std::vector<int64_t> tot(ns), hit(ns), cln(ns), chit(ns);
  ParallelFor(ns, [&](int64_t i) {
    const Tensor& z = perturbed_streams[i];
    if (z.rows() != static_cast<int64_t>(true_ids[i].size())) {
      throw ShapeError("stream length and id count differ");
    }
    const Tensor obs = toylm::Predict(predictor, z).hidden_states.at(cfg.layer);
    const std::vector<int64_t> rec = RecoverStream(predictor, obs, cfg);
    for (size_t t = 0; t < rec.size(); ++t) {
      const bool ok = rec[t] == true_ids[i][t];
      ++tot[i];
      hit[i] += ok;
      if (!stop.count(true_ids[i][t])) {
        ++cln[i];
        chit[i] += ok;
      }
    }
  });
  AttackReport r;
  r.attack = "vocab";
  r.layer = cfg.layer;
  r.has_clean = true;
  int64_t h = 0, c = 0;
  for (int64_t i = 0; i < ns; ++i) {
    r.n += tot[i];
    h += hit[i];
    r.n_clean += cln[i];
    c += chit[i];
  }
  r.total_asr = static_cast<double>(h) / static_cast<double>(r.n);
  r.clean_asr = r.n_clean ? static_cast<double>(c) / static_cast<double>(r.n_clean) : 0.0;
  r.asr[1] = r.total_asr;
  return r;
}

}  // namespace osnip::attacks
