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

#ifndef OSNIP_DIFFMATH_ADAM_H_
#define OSNIP_DIFFMATH_ADAM_H_

#include <map>
#include <string>

#include "osnip/diffmath/autodiff.h"
#include "osnip/diffmath/container.h"

namespace osnip {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Plain SGD with step lr when false.
  bool adaptive = true;
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  // Updates every trainable parameter that has a gradient entry.
  void Step(ParamStore& params, const std::map<std::string, Tensor>& grads);

  int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  // Moments are stored as "<prefix>m/<name>" and "<prefix>v/<name>".
  void Pack(const std::string& prefix, Container& c) const;
  void Unpack(const Container& c, const std::string& prefix);

 private:
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::map<std::string, Tensor> m_, v_;
};

}  // namespace osnip

#endif  // OSNIP_DIFFMATH_ADAM_H_
