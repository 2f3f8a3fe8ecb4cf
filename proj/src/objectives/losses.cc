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

#include "osnip/objectives/losses.h"

#include <cmath>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"

namespace osnip::objectives {
namespace {

void CheckDistribution(const Tensor& p, const char* what) {
  double s = 0.0;
  for (double v : p.vec()) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError(std::string(what) + " is not a distribution");
    s += v;
  }
  if (std::fabs(s - 1.0) > 1e-9) throw NumericError(std::string(what) + " does not sum to 1");
}

double Cosine(const Tensor& h, const Tensor& z) {
  if (h.size() != z.size()) throw ShapeError("cosine of vectors with different sizes");
  const double nh = ops::Norm(h), nz = ops::Norm(z);
  if (nh == 0.0 || nz == 0.0) throw NumericError("cosine with a zero vector");
  double dot = 0.0;
  for (int64_t i = 0; i < h.size(); ++i) dot += h[i] * z[i];
  return dot / (nh * nz);
}

}  // namespace

double LossUtil(const Tensor& p, const Tensor& q, bool* floored) {
  if (p.size() != q.size()) throw ShapeError("LossUtil: p and q sizes differ");
  CheckDistribution(p, "p");
  CheckDistribution(q, "q");
  const int64_t n = p.size();
  return ops::KlRows(p.Reshaped({1, n}), q.Reshaped({1, n}), floored)[0];
}

double LossPriv(const Tensor& h, const Tensor& z, double eps) {
  return std::max(0.0, std::fabs(Cosine(h, z)) - eps);
}

double LossDiv(const Tensor& z1, const Tensor& z2, double margin) {
  if (z1.shape() != z2.shape()) throw ShapeError("LossDiv: shapes differ");
  return std::max(0.0, margin - ops::Norm(ops::Sub(z1, z2)));
}

ad::Var UtilVar(const Tensor& clean_log_probs, const ad::Var& logits) {
  Tensor p = clean_log_probs;
  for (double& v : p.vec()) v = std::exp(v);
  const ad::Var diff = ad::Sub(ad::Constant(clean_log_probs), ad::LogSoftmaxRows(logits));
  return ad::Mean(ad::RowSums(ad::Mul(ad::Constant(p), diff)));
}

ad::Var PrivVar(const Tensor& h, const ad::Var& z, double eps) {
  const ad::Var hn = ad::Constant(ops::RowNorms(h));
  const ad::Var cos = ad::Div(ad::RowDot(ad::Constant(h), z), ad::Mul(hn, ad::RowNorms(z)));
  return ad::Mean(ad::Relu(ad::AddScalar(ad::Abs(cos), -eps)));
}

ad::Var DivVar(const ad::Var& z1, const ad::Var& z2, double margin) {
  const ad::Var dist = ad::RowNorms(ad::Sub(z1, z2));
  return ad::Mean(ad::Relu(ad::AddScalar(ad::Scale(dist, -1.0), margin)));
}

TotalLossResult TotalLoss(const toylm::PredictorModel& predictor,
                          const encryptor::EncryptorModel& enc, const Tensor& h,
                          const std::vector<int64_t>& lengths, const std::vector<Tensor>& key_embs,
                          int64_t step, const CurriculumConfig& cfg, GateState* gate,
                          const std::vector<int64_t>* rows) {
  cfg.Validate();
  if (key_embs.size() < 2) throw ConfigError("the training objective needs at least two keys");
  const Tensor hb = rows ? ops::GatherRows(h, *rows) : h;
  const Tensor clean =
      ops::LogSoftmaxRows(toylm::Forward(predictor, ad::Constant(hb), lengths).logits->value);
  const ad::Var hc = ad::Constant(h);
  const double inv_k = 1.0 / static_cast<double>(key_embs.size());

  std::vector<ad::Var> zs;
  ad::Var util, priv;
  bool floored = false;
  const double log_floor = std::log(ops::kProbFloor);
  for (const Tensor& k : key_embs) {
    ad::Var z = encryptor::EncryptVar(enc, hc, k, true);
    if (rows) z = ad::GatherRows(z, *rows);
    const ad::Var logits = toylm::Forward(predictor, z, lengths).logits;
    const ad::Var u = ad::Scale(UtilVar(clean, logits), inv_k);
    const ad::Var p = ad::Scale(PrivVar(hb, z, cfg.eps_margin), inv_k);
    for (double v : ops::LogSoftmaxRows(logits->value).vec()) floored = floored || v < log_floor;
    util = util ? ad::Add(util, u) : u;
    priv = priv ? ad::Add(priv, p) : p;
    zs.push_back(std::move(z));
  }
  ad::Var div;
  const double inv_pairs = 2.0 / static_cast<double>(zs.size() * (zs.size() - 1));
  for (size_t i = 0; i < zs.size(); ++i) {
    for (size_t j = i + 1; j < zs.size(); ++j) {
      const ad::Var d = ad::Scale(DivVar(zs[i], zs[j], cfg.margin_div), inv_pairs);
      div = div ? ad::Add(div, d) : d;
    }
  }

  TotalLossResult r;
  LossBreakdown& b = r.breakdown;
  b.util = util->value.item();
  b.priv = priv->value.item();
  b.div = div->value.item();
  b.floored = floored;
  const double gate_input = gate ? gate->Observe(b.util, cfg) : b.util;
  const EffectiveLambdas lam = ComputeLambdas(step, gate_input, cfg);
  b.eff_lambda1 = lam.lambda1;
  b.eff_lambda2 = lam.lambda2;
  b.w_time = lam.w_time;
  b.w_safe = lam.w_safe;
  r.total = ad::Add(ad::Add(util, ad::Scale(priv, lam.lambda1)), ad::Scale(div, lam.lambda2));
  b.total = r.total->value.item();
  return r;
}

}  // namespace osnip::objectives
