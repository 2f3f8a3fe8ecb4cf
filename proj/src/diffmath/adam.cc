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

#include "osnip/diffmath/adam.h"

#include <cmath>

#include "osnip/diffmath/errors.h"

namespace osnip {

void Adam::Step(ParamStore& params, const std::map<std::string, Tensor>& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (const auto& [name, g] : grads) {
    if (!params.Trainable(name)) throw ConfigError("gradient for frozen parameter '" + name + "'");
    Tensor& w = params.Mutable(name);
    if (g.shape() != w.shape()) throw ShapeError("gradient shape mismatch for '" + name + "'");
    g.CheckFinite("gradient of " + name);
    if (!cfg_.adaptive) {
      for (int64_t i = 0; i < w.size(); ++i) w[i] -= cfg_.lr * g[i];
      continue;
    }
    auto [mi, fresh_m] = m_.try_emplace(name, Tensor(w.shape()));
    auto [vi, fresh_v] = v_.try_emplace(name, Tensor(w.shape()));
    Tensor& m = mi->second;
    Tensor& v = vi->second;
    for (int64_t i = 0; i < w.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      w[i] -= cfg_.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg_.eps);
    }
  }
}

void Adam::Pack(const std::string& prefix, Container& c) const {
  c.meta[prefix + "step"] = t_;
  for (const auto& [name, t] : m_) c.tensors.emplace_back(prefix + "m/" + name, t);
  for (const auto& [name, t] : v_) c.tensors.emplace_back(prefix + "v/" + name, t);
}

void Adam::Unpack(const Container& c, const std::string& prefix) {
  const auto it = c.meta.find(prefix + "step");
  if (it == c.meta.end()) throw CorruptHeaderError("missing optimizer state '" + prefix + "'");
  t_ = it->get<int64_t>();
  m_.clear();
  v_.clear();
  for (const auto& [n, t] : c.tensors) {
    if (n.rfind(prefix + "m/", 0) == 0) m_[n.substr(prefix.size() + 2)] = t;
    if (n.rfind(prefix + "v/", 0) == 0) v_[n.substr(prefix.size() + 2)] = t;
  }
}

}  // namespace osnip
