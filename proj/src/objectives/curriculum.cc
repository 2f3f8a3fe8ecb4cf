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

#include "osnip/objectives/curriculum.h"

#include <algorithm>
#include <cmath>

#include "osnip/diffmath/errors.h"

namespace osnip::objectives {

void CurriculumConfig::Validate() const {
  if (!(lambda1_base >= 0.0) || !(lambda2_base >= 0.0)) {
    throw ConfigError("curriculum lambda bases must be >= 0");
  }
  if (!(eps_margin >= 0.0 && eps_margin < 1.0)) throw ConfigError("curriculum.eps must be in [0, 1)");
  if (!(margin_div > 0.0) || !std::isfinite(margin_div)) {
    throw ConfigError("curriculum diversity margin must be > 0");
  }
  if (warmup_steps < 0) throw ConfigError("curriculum.warmup_steps must be >= 0");
  if (!(tau_low < tau_high)) throw ConfigError("curriculum needs tau_low < tau_high");
  if (!(gate_ema >= 0.0 && gate_ema < 1.0)) throw ConfigError("curriculum.gate_ema must be in [0, 1)");
}

double SafetyGate(double util_loss, double tau_low, double tau_high) {
  if (!(tau_low < tau_high)) throw ConfigError("safety gate needs tau_low < tau_high");
  return std::clamp((tau_high - util_loss) / (tau_high - tau_low), 0.0, 1.0);
}

double WarmupWeight(int64_t step, int64_t warmup_steps) {
  if (step < 0) throw ConfigError("step must be >= 0");
  if (warmup_steps == 0) return 1.0;
  return std::min(static_cast<double>(step) / static_cast<double>(warmup_steps), 1.0);
}

EffectiveLambdas ComputeLambdas(int64_t step, double util_loss, const CurriculumConfig& cfg) {
  EffectiveLambdas e;
  e.w_time = WarmupWeight(step, cfg.warmup_steps);
  e.w_safe = SafetyGate(util_loss, cfg.tau_low, cfg.tau_high);
  e.lambda1 = cfg.lambda1_base * e.w_time * e.w_safe;
  e.lambda2 = cfg.lambda2_base * e.w_time * e.w_safe;
  return e;
}

double GateState::Observe(double util_loss, const CurriculumConfig& cfg) {
  if (cfg.gate_ema <= 0.0) return util_loss;
  ema_ = initialized_ ? cfg.gate_ema * ema_ + (1.0 - cfg.gate_ema) * util_loss : util_loss;
  initialized_ = true;
  return ema_;
}

}  // namespace osnip::objectives
