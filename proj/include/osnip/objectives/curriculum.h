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

#ifndef OSNIP_OBJECTIVES_CURRICULUM_H_
#define OSNIP_OBJECTIVES_CURRICULUM_H_

#include <cstdint>

namespace osnip::objectives {

struct CurriculumConfig {
  double lambda1_base = 60.0;
  double lambda2_base = 1.0;
  double eps_margin = 0.1;
  double margin_div = 1.0;  // absolute distance
  int64_t warmup_steps = 1000;
  double tau_low = 0.02;
  double tau_high = 0.2;
  // 0 gates on the instantaneous utility loss; a value in (0, 1) gates on an
  // exponential moving average with this decay (non-default).
  double gate_ema = 0.0;

  void Validate() const;
};

// clip((tau_high - l) / (tau_high - tau_low), 0, 1).
double SafetyGate(double util_loss, double tau_low, double tau_high);
// min(t / W, 1); W = 0 means no warmup.
double WarmupWeight(int64_t step, int64_t warmup_steps);

struct EffectiveLambdas {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double w_time = 0.0;
  double w_safe = 0.0;
};

EffectiveLambdas ComputeLambdas(int64_t step, double util_loss, const CurriculumConfig& cfg);

// Gate input tracker; holds the moving average when gate_ema > 0.
class GateState {
 public:
  // Returns the value the safety gate should see at this step.
  double Observe(double util_loss, const CurriculumConfig& cfg);

  bool initialized() const { return initialized_; }
  double ema() const { return ema_; }
  void Restore(bool initialized, double ema) {
    initialized_ = initialized;
    ema_ = ema;
  }

 private:
  bool initialized_ = false;
  double ema_ = 0.0;
};

}  // namespace osnip::objectives

#endif  // OSNIP_OBJECTIVES_CURRICULUM_H_
