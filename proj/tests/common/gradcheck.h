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

// Central finite-difference oracle for reverse-mode gradients.

#ifndef OSNIP_TESTS_COMMON_GRADCHECK_H_
#define OSNIP_TESTS_COMMON_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "osnip/diffmath/autodiff.h"
#include "osnip/diffmath/rng.h"

namespace osnip::testing {

using ScalarFn = std::function<ad::Var(const std::vector<ad::Var>&)>;

struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
};

// Worst relative error over all inputs; each tensor is compared against its
// own magnitude, floored at 1e-3.
inline GradCheckResult CheckGradient(const ScalarFn& f, const std::vector<Tensor>& inputs,
                                     double step = 1e-5) {
  std::vector<ad::Var> vars;
  for (const Tensor& t : inputs) vars.push_back(ad::Variable(t));
  const std::vector<Tensor> analytic = ad::GradWrt(f(vars), vars);
  GradCheckResult res;
  for (size_t k = 0; k < inputs.size(); ++k) {
    Tensor numeric(inputs[k].shape());
    for (int64_t i = 0; i < inputs[k].size(); ++i) {
      auto eval = [&](double delta) {
        std::vector<ad::Var> c;
        for (size_t j = 0; j < inputs.size(); ++j) {
          Tensor t = inputs[j];
          if (j == k) t[i] += delta;
          c.push_back(ad::Constant(t));
        }
        return f(c)->value.item();
      };
      numeric[i] = (eval(step) - eval(-step)) / (2.0 * step);
    }
    double scale = 1e-3;
    for (int64_t i = 0; i < numeric.size(); ++i) {
      scale = std::max({scale, std::fabs(numeric[i]), std::fabs(analytic[k][i])});
    }
    for (int64_t i = 0; i < numeric.size(); ++i) {
      res.max_rel_err = std::max(res.max_rel_err, std::fabs(numeric[i] - analytic[k][i]) / scale);
    }
    ++res.checked;
  }
  return res;
}

inline Tensor RandomTensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& x : t.vec()) x = lo + (hi - lo) * rng.Uniform();
  return t;
}

// Values bounded away from zero, for kinked or singular ops.
inline Tensor RandomAwayFromZero(Rng& rng, Shape shape, double min_abs = 0.05) {
  Tensor t(std::move(shape));
  for (double& x : t.vec()) {
    const double m = min_abs + (1.0 - min_abs) * rng.Uniform();
    x = rng.Uniform() < 0.5 ? -m : m;
  }
  return t;
}

// Contracts a tensor-valued output with a fixed random cotangent.
inline ad::Var Contract(const ad::Var& out, const Tensor& w) {
  return ad::Sum(ad::Mul(ad::Reshape(out, w.shape()), ad::Constant(w)));
}

}  // namespace osnip::testing

#endif  // OSNIP_TESTS_COMMON_GRADCHECK_H_
