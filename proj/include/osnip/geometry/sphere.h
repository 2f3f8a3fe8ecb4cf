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

// Measure of orthogonal bands on the sphere S^{d-1}_r and the Gaussian
// identities behind their concentration bound.

#ifndef OSNIP_GEOMETRY_SPHERE_H_
#define OSNIP_GEOMETRY_SPHERE_H_

#include <cstdint>
#include <vector>

#include "osnip/diffmath/rng.h"
#include "osnip/diffmath/tensor.h"

namespace osnip::geometry {

struct SphereSpec {
  int64_t d = 2;
  double r = 1.0;

  void Validate() const;
};

// n rows, each uniform on the radius-r sphere (normalized Gaussians).
Tensor SampleUniformSphere(const SphereSpec& spec, int64_t n, Rng& rng);

// 2 exp(-(d-2) eps^2 / 2); needs d >= 3 and 0 < eps < 1.
double BandComplementBound(int64_t d, double eps);

// P(|<u, h_hat>| <= eps) from the Beta(1/2, (d-1)/2) law of <u, h_hat>^2.
double ExactBandMass(int64_t d, double eps);
// 1 - ExactBandMass, computed without cancellation.
double ExactBandComplement(int64_t d, double eps);

struct BoundReport {
  int64_t d = 0;
  double eps = 0.0;
  int64_t n = 0;
  double mc_mass = 0.0;     // fraction with |<u, h_hat>| > eps
  double exact_mass = 0.0;  // 1 - ExactBandMass
  double bound = 0.0;
  double std_err = 0.0;     // binomial, at the exact mass
  bool satisfied = false;   // mc_mass <= bound + 3 std_err
  bool agrees = false;      // |mc_mass - exact_mass| <= 4 std_err
};

// One shared sample set of n >= 1e4 directions evaluated at every eps.
std::vector<BoundReport> McBandMass(const SphereSpec& spec, const std::vector<double>& eps,
                                    int64_t n, const Rng& rng);
BoundReport McBandMass(const SphereSpec& spec, double eps, int64_t n, const Rng& rng);

struct MgfResult {
  double t = 0.0;
  int64_t dof = 0;
  double mc = 0.0;
  double closed_form = 0.0;  // (1 + 2t)^(-dof/2)
  double std_err = 0.0;
  double residual = 0.0;     // |mc - closed_form|
  bool ok = false;           // residual < 5 std_err, or exact equality
};

// E[exp(-t Y)] for Y ~ chi^2_dof, one sample set shared across t. Uses
// importance sampling from a proposal with variance 1/(1+t); t = 0 reduces
// to plain sampling.
std::vector<MgfResult> GaussianMgfCheck(const std::vector<double>& t, int64_t dof, int64_t n,
                                        const Rng& rng);
MgfResult GaussianMgfCheck(double t, int64_t dof, int64_t n, const Rng& rng);

}  // namespace osnip::geometry

#endif  // OSNIP_GEOMETRY_SPHERE_H_
