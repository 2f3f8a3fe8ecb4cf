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

#include "osnip/encryptor/encryptor.h"

#include <cmath>
#include <string>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"

namespace osnip::encryptor {
namespace {

std::string W(int64_t l) { return "W." + std::to_string(l); }
std::string B(int64_t l) { return "b." + std::to_string(l); }

ad::Var Param(const EncryptorModel& m, const std::string& name, bool record) {
  return record ? m.params.Var(name) : ad::Constant(m.params.Get(name));
}

Tensor UniformInit(Rng& rng, Shape s, double bound) {
  Tensor t(std::move(s));
  for (double& x : t.vec()) x = bound * (2.0 * rng.Uniform() - 1.0);
  return t;
}

Tensor CheckedNorms(const Tensor& h) {
  const Tensor r = ops::RowNorms(h);
  for (double v : r.vec()) {
    if (!(v > 0.0)) throw NumericError("cannot encrypt a zero embedding");
  }
  return r;
}

}  // namespace

void EncryptorConfig::Validate() const {
  if (dim < 2) throw ConfigError("encryptor.dim must be >= 2");
  if (key_dim < 1) throw ConfigError("encryptor.key_dim must be >= 1");
  if (hidden < 1 || depth < 1) throw ConfigError("encryptor.hidden and depth must be >= 1");
}

EncryptorModel InitEncryptor(const EncryptorConfig& cfg, Rng& rng) {
  cfg.Validate();
  EncryptorModel m;
  m.config = cfg;
  int64_t fan_in = cfg.dim + cfg.key_dim;
  for (int64_t l = 0; l < cfg.depth; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    m.params.Add(W(l), UniformInit(rng, {cfg.hidden, fan_in}, bound));
    m.params.Add(B(l), UniformInit(rng, {cfg.hidden}, bound));
    fan_in = cfg.hidden;
  }
  m.params.Add(W(cfg.depth), Tensor({cfg.dim, cfg.hidden}));
  m.params.Add(B(cfg.depth), Tensor({cfg.dim}));
  return m;
}

Tensor Project(const Tensor& h, const Tensor& delta) {
  if (h.shape() != delta.shape()) throw ShapeError("project: h and delta shapes differ");
  const Tensor hm = h.rank() == 1 ? h.Reshaped({1, h.size()}) : h;
  const Tensor y = ops::Add(hm, delta.Reshaped(hm.shape()));
  const Tensor r = CheckedNorms(hm);
  const Tensor ry = ops::RowNorms(y);
  Tensor s = r;
  for (int64_t i = 0; i < s.size(); ++i) {
    if (!(ry[i] > 0.0)) throw NumericError("project: h + delta is zero, direction undefined");
    s[i] = r[i] / ry[i];
  }
  return ops::MulRowScalars(y, s).Reshaped(h.shape());
}

namespace {

// delta = ||h|| * MLP([h/||h|| ; k]).
ad::Var DeltaVar(const EncryptorModel& m, const Tensor& hv, const ad::Var& rv, const Tensor& key_emb,
                 bool record) {
  const EncryptorConfig& c = m.config;
  const int64_t n = hv.rows();
  Tensor inv_r = rv->value;
  for (double& v : inv_r.vec()) v = 1.0 / v;
  ad::Var x = ad::ConcatCols(ad::Constant(ops::MulRowScalars(hv, inv_r)),
                             ad::Constant(ops::BroadcastRow(key_emb.Reshaped({c.key_dim}), n)));
  for (int64_t l = 0; l < c.depth; ++l) {
    x = ad::Tanh(ad::AddRowVector(ad::MatMulTransB(x, Param(m, W(l), record)), Param(m, B(l), record)));
  }
  const ad::Var mlp = ad::AddRowVector(ad::MatMulTransB(x, Param(m, W(c.depth), record)),
                                       Param(m, B(c.depth), record));
  return ad::MulRowScalars(mlp, rv);
}

void CheckInputs(const EncryptorModel& m, const Tensor& hv, const Tensor& key_emb) {
  const EncryptorConfig& c = m.config;
  if (hv.rank() != 2 || hv.cols() != c.dim) {
    throw ShapeError("encryptor input must be [T, " + std::to_string(c.dim) + "], got " +
                     ShapeString(hv.shape()));
  }
  if (key_emb.size() != c.key_dim) throw ShapeError("key embedding has the wrong dimension");
}

}  // namespace

ad::Var EncryptVar(const EncryptorModel& m, const ad::Var& h, const Tensor& key_emb, bool record) {
  const Tensor& hv = h->value;
  CheckInputs(m, hv, key_emb);
  const ad::Var rv = ad::Constant(CheckedNorms(hv));
  const ad::Var y = ad::Add(h, DeltaVar(m, hv, rv, key_emb, record));
  const Tensor& yn = ops::RowNorms(y->value);
  for (double v : yn.vec()) {
    if (!(v > 0.0)) throw NumericError("encryptor: h + delta is zero, direction undefined");
  }
  const ad::Var z = ad::MulRowScalars(y, ad::Div(rv, ad::RowNorms(y)));
  z->value.CheckFinite("encryptor output");
  return z;
}

Tensor Perturbation(const EncryptorModel& m, const Tensor& h, const Tensor& key_emb) {
  CheckInputs(m, h, key_emb);
  return DeltaVar(m, h, ad::Constant(CheckedNorms(h)), key_emb, false)->value;
}

Tensor Perturbation(const EncryptorModel& m, const Tensor& h, const SecretKey& key) {
  return Perturbation(m, h, ExpandKey(key, m.config.key_dim));
}

Tensor Encrypt(const EncryptorModel& m, const Tensor& h, const Tensor& key_emb) {
  return EncryptVar(m, ad::Constant(h), key_emb, false)->value;
}

Tensor Encrypt(const EncryptorModel& m, const Tensor& h, const SecretKey& key) {
  return Encrypt(m, h, ExpandKey(key, m.config.key_dim));
}

void PackEncryptor(const EncryptorModel& m, Container& c) {
  const EncryptorConfig& k = m.config;
  c.meta["encryptor"] = {
      {"dim", k.dim}, {"key_dim", k.key_dim}, {"hidden", k.hidden}, {"depth", k.depth}};
  PackParams(m.params, "enc/", c);
}

EncryptorModel UnpackEncryptor(const Container& c) {
  const auto it = c.meta.find("encryptor");
  if (it == c.meta.end()) throw CorruptHeaderError("checkpoint has no encryptor section");
  EncryptorModel m;
  try {
    m.config.dim = it->at("dim").get<int64_t>();
    m.config.key_dim = it->at("key_dim").get<int64_t>();
    m.config.hidden = it->at("hidden").get<int64_t>();
    m.config.depth = it->at("depth").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptHeaderError(std::string("bad encryptor header: ") + e.what());
  }
  m.config.Validate();
  m.params = UnpackParams(c, "enc/");
  Rng scratch(0);
  const EncryptorModel ref = InitEncryptor(m.config, scratch);
  for (const std::string& name : ref.params.Names()) {
    if (!m.params.Has(name) || m.params.Get(name).shape() != ref.params.Get(name).shape()) {
      throw CorruptHeaderError("encryptor parameter '" + name + "' missing or misshapen");
    }
  }
  return m;
}

}  // namespace osnip::encryptor
