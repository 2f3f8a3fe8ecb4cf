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

#include "osnip/toylm/predictor.h"

#include <algorithm>
#include <cmath>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"

namespace osnip::toylm {
namespace {

std::string L(const char* base, int64_t layer) { return std::string(base) + "." + std::to_string(layer); }

Tensor Gaussian(Rng& rng, Shape s, double scale) {
  Tensor t(std::move(s));
  for (double& x : t.vec()) x = scale * rng.Normal();
  return t;
}

int64_t ArgMax(const double* p, int64_t n) {
  return std::max_element(p, p + n) - p;
}

}  // namespace

void PredictorConfig::Validate() const {
  if (vocab_size < 8) throw ConfigError("predictor.vocab_size must be >= 8");
  if (embed_dim < 3) throw ConfigError("predictor.embed_dim must be >= 3");
  if (model_dim < 1 || model_dim > embed_dim) {
    throw ConfigError("predictor.model_dim must be in [1, embed_dim]");
  }
  if (hidden < 1 || layers < 1 || num_classes < 2) {
    throw ConfigError("predictor.hidden, layers >= 1 and num_classes >= 2 required");
  }
}

void PredictorModel::Freeze() {
  params.FreezeAll();
  frozen = true;
}

PredictorModel InitPredictor(const PredictorConfig& cfg, Rng& rng) {
  cfg.Validate();
  PredictorModel m;
  m.config = cfg;
  const int64_t d = cfg.embed_dim, dm = cfg.model_dim, h = cfg.hidden;
  m.params.Add("E", Gaussian(rng, {cfg.vocab_size, d}, 1.0));
  m.params.Add("P", Gaussian(rng, {dm, d}, 1.0 / std::sqrt(static_cast<double>(d))));
  for (int64_t l = 0; l < cfg.layers; ++l) {
    m.params.Add(L("W1", l), Gaussian(rng, {h, 2 * dm}, 1.0 / std::sqrt(2.0 * dm)));
    m.params.Add(L("b1", l), Tensor({h}));
    m.params.Add(L("W2", l), Gaussian(rng, {dm, h}, 1.0 / std::sqrt(static_cast<double>(h))));
    m.params.Add(L("b2", l), Tensor({dm}));
  }
  m.params.Add("U", Gaussian(rng, {cfg.vocab_size, dm}, 1.0 / std::sqrt(static_cast<double>(dm))));
  m.params.Add("bu", Tensor({cfg.vocab_size}));
  m.params.Add("Wc", Tensor({cfg.num_classes, dm}));
  m.params.Add("bc", Tensor({cfg.num_classes}));
  return m;
}

ad::Var InputProjection(const PredictorModel& m, const ad::Var& emb) {
  if (emb->value.rank() != 2 || emb->value.cols() != m.config.embed_dim) {
    throw ShapeError("predictor input must be [T, " + std::to_string(m.config.embed_dim) +
                     "], got " + ShapeString(emb->value.shape()));
  }
  return ad::MatMulTransB(emb, m.params.Var("P"));
}

ad::Var Block(const PredictorModel& m, int64_t layer, const ad::Var& x, const ad::Var& ctx) {
  ad::Var pre = ad::AddRowVector(ad::MatMulTransB(ad::ConcatCols(x, ctx), m.params.Var(L("W1", layer))),
                                 m.params.Var(L("b1", layer)));
  ad::Var out = ad::AddRowVector(ad::MatMulTransB(ad::Tanh(pre), m.params.Var(L("W2", layer))),
                                 m.params.Var(L("b2", layer)));
  return ad::Add(x, out);
}

ForwardVars Forward(const PredictorModel& m, const ad::Var& emb, const std::vector<int64_t>& lengths) {
  ForwardVars out;
  out.states.push_back(emb);
  ad::Var x = InputProjection(m, emb);
  for (int64_t l = 0; l < m.config.layers; ++l) {
    x = Block(m, l, x, ad::CausalMeanPool(x, lengths));
    out.states.push_back(x);
  }
  out.logits = ad::AddRowVector(ad::MatMulTransB(x, m.params.Var("U")), m.params.Var("bu"));
  out.class_logits = ad::AddRowVector(ad::MatMulTransB(ad::SegmentMean(x, lengths), m.params.Var("Wc")),
                                      m.params.Var("bc"));
  return out;
}

Tensor Embed(const PredictorModel& m, const std::vector<int64_t>& ids) {
  return ops::GatherRows(m.Embeddings(), ids);
}

PredictorOutput Predict(const PredictorModel& m, const Tensor& embeddings) {
  embeddings.CheckFinite("Predict input");
  const ForwardVars f = Forward(m, ad::Constant(embeddings), {embeddings.rows()});
  PredictorOutput out;
  out.distribution = ops::SoftmaxRows(f.logits->value);
  out.class_logits = f.class_logits->value.Reshaped({m.config.num_classes});
  for (const ad::Var& s : f.states) out.hidden_states.push_back(s->value);
  return out;
}

double Perplexity(const PredictorModel& m, const ToyCorpus& corpus, const EmbeddingTransform& transform) {
  if (corpus.size() == 0) throw ConfigError("perplexity of an empty corpus");
  std::vector<double> nll(corpus.size());
  std::vector<int64_t> cnt(corpus.size());
  ParallelFor(static_cast<int64_t>(corpus.size()), [&](int64_t i) {
    const auto& s = corpus.sequences[i];
    Tensor emb = Embed(m, s);
    if (transform) emb = transform(emb, static_cast<size_t>(i));
    const ForwardVars f = Forward(m, ad::Constant(emb), {emb.rows()});
    const Tensor lp = ops::LogSoftmaxRows(f.logits->value);
    const int64_t v = lp.cols();
    double acc = 0.0;
    for (size_t t = 0; t + 1 < s.size(); ++t) acc -= lp[t * v + s[t + 1]];
    nll[i] = acc;
    cnt[i] = static_cast<int64_t>(s.size()) - 1;
  });
  double total = 0.0;
  int64_t n = 0;
  for (size_t i = 0; i < nll.size(); ++i) {
    total += nll[i];
    n += cnt[i];
  }
  return std::exp(total / static_cast<double>(n));
}

double ClassificationAccuracy(const PredictorModel& m, const ToyCorpus& corpus,
                              const EmbeddingTransform& transform) {
  if (corpus.size() == 0) throw ConfigError("accuracy of an empty corpus");
  std::vector<int> hit(corpus.size());
  ParallelFor(static_cast<int64_t>(corpus.size()), [&](int64_t i) {
    Tensor emb = Embed(m, corpus.sequences[i]);
    if (transform) emb = transform(emb, static_cast<size_t>(i));
    const ForwardVars f = Forward(m, ad::Constant(emb), {emb.rows()});
    hit[i] = ArgMax(f.class_logits->value.data(), m.config.num_classes) == corpus.labels[i];
  });
  int64_t n = 0;
  for (int h : hit) n += h;
  return static_cast<double>(n) / static_cast<double>(corpus.size());
}

std::string ParamHash(const ParamStore& params) {
  std::string buf;
  for (const std::string& name : params.Names()) {
    buf += name;
    buf += HashTensor(params.Get(name));
  }
  return Sha256Hex(buf);
}

void PackPredictor(const PredictorModel& m, Container& c) {
  const PredictorConfig& k = m.config;
  c.meta["predictor"] = {{"vocab_size", k.vocab_size}, {"embed_dim", k.embed_dim},
                         {"model_dim", k.model_dim},   {"hidden", k.hidden},
                         {"layers", k.layers},         {"num_classes", k.num_classes},
                         {"frozen", m.frozen}};
  PackParams(m.params, "pred/", c);
}

PredictorModel UnpackPredictor(const Container& c) {
  const auto it = c.meta.find("predictor");
  if (it == c.meta.end()) throw CorruptHeaderError("checkpoint has no predictor section");
  PredictorModel m;
  try {
    m.config.vocab_size = it->at("vocab_size").get<int64_t>();
    m.config.embed_dim = it->at("embed_dim").get<int64_t>();
    m.config.model_dim = it->at("model_dim").get<int64_t>();
    m.config.hidden = it->at("hidden").get<int64_t>();
    m.config.layers = it->at("layers").get<int64_t>();
    m.config.num_classes = it->at("num_classes").get<int64_t>();
    m.frozen = it->at("frozen").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptHeaderError(std::string("bad predictor header: ") + e.what());
  }
  m.params = UnpackParams(c, "pred/");
  Rng scratch(0);
  const PredictorModel ref = InitPredictor(m.config, scratch);
  for (const std::string& name : ref.params.Names()) {
    if (!m.params.Has(name) || m.params.Get(name).shape() != ref.params.Get(name).shape()) {
      throw CorruptHeaderError("predictor parameter '" + name + "' missing or misshapen");
    }
  }
  return m;
}

}  // namespace osnip::toylm
