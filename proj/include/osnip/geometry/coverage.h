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

// Monte Carlo estimates of semantic coverage and of the obfuscated null space
// around a single embedding h, over iso-norm directions r·u.

#ifndef OSNIP_GEOMETRY_COVERAGE_H_
#define OSNIP_GEOMETRY_COVERAGE_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "osnip/diffmath/rng.h"
#include "osnip/diffmath/tensor.h"
#include "osnip/toylm/predictor.h"

namespace osnip::geometry {

// Maps points [n, d] to distributions [n, |V|].
using DistributionFn = std::function<Tensor(const Tensor& points)>;

// Each point is treated as a length-1 sequence.
DistributionFn PredictorPointFn(const toylm::PredictorModel& m);
DistributionFn ConstantPointFn(const Tensor& p);

struct CoverageEstimate {
  double alpha_hat = 0.0;
  double std_err = 0.0;
  int64_t n = 0;
};

struct DirectionalSample {
  std::vector<double> kl;   // KL(f(h) || f(r u))
  std::vector<double> cos;  // <u, h_hat>
};

// n directions u uniform on the sphere, evaluated at r u with r = ||h||.
DirectionalSample SampleDirections(const DistributionFn& f, const Tensor& h, int64_t n, const Rng& rng);

CoverageEstimate EstimateCoverage(const DistributionFn& f, const Tensor& h, double delta_util,
                                  int64_t n, const Rng& rng);
CoverageEstimate EstimateCoverage(const toylm::PredictorModel& m, const Tensor& h,
                                  double delta_util, int64_t n, const Rng& rng);

struct NullspaceCheck {
  double sigma_hat = 0.0;  // fraction in coverage set and band
  double alpha_hat = 0.0;  // fraction in coverage set
  double gap = 0.0;        // fraction in coverage set outside the band
  double bound = 0.0;
  double std_err = 0.0;    // largest binomial stderr of the three fractions
  int64_t n = 0;
  bool lower_bound_ok = false;
  bool gap_ok = false;
};

NullspaceCheck NullspaceMassCheck(const DistributionFn& f, const Tensor& h, double delta_util,
                                  double eps, int64_t n, const Rng& rng);
NullspaceCheck NullspaceMassCheck(const toylm::PredictorModel& m, const Tensor& h,
                                  double delta_util, double eps, int64_t n, const Rng& rng);

// q-quantile (0 <= q <= 1) by linear interpolation of the sorted values.
double Quantile(std::vector<double> values, double q);

}  // namespace osnip::geometry

#endif  // OSNIP_GEOMETRY_COVERAGE_H_
