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

#include "osnip/geometry/sphere.h"

#include <algorithm>
#include <cmath>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"
#include "osnip/geometry/special.h"

namespace osnip::geometry {
namespace {

constexpr int64_t kShard = 1 << 14;
constexpr uint64_t kDirectionStream = ~uint64_t{0};

int64_t NumShards(int64_t n) { return (n + kShard - 1) / kShard; }

void CheckEps(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("eps must be in [0, 1]");
}

}  // namespace

void SphereSpec::Validate() const {
  if (d < 2) throw ConfigError("sphere dimension must be >= 2");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("sphere radius must be positive");
}

Tensor SampleUniformSphere(const SphereSpec& spec, int64_t n, Rng& rng) {
  spec.Validate();
  if (n < 1) throw ConfigError("sample count must be >= 1");
  Tensor out({n, spec.d});
  for (int64_t i = 0; i < n; ++i) {
    double* row = out.data() + i * spec.d;
    double s2;
    do {
      rng.FillNormal(row, spec.d);
      s2 = 0.0;
      for (int64_t j = 0; j < spec.d; ++j) s2 += row[j] * row[j];
    } while (s2 == 0.0);
    const double scale = spec.r / std::sqrt(s2);
    for (int64_t j = 0; j < spec.d; ++j) row[j] *= scale;
  }
  return out;
}

double BandComplementBound(int64_t d, double eps) {
  if (d < 3) throw ConfigError("the band bound needs d >= 3");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("the band bound needs 0 < eps < 1");
  return 2.0 * std::exp(-static_cast<double>(d - 2) * eps * eps / 2.0);
}

double ExactBandMass(int64_t d, double eps) {
  if (d < 2) throw ConfigError("sphere dimension must be >= 2");
  CheckEps(eps);
  return RegularizedIncompleteBeta(0.5, 0.5 * static_cast<double>(d - 1), eps * eps);
}

double ExactBandComplement(int64_t d, double eps) {
  if (d < 2) throw ConfigError("sphere dimension must be >= 2");
  CheckEps(eps);
  return RegularizedIncompleteBetaComplement(0.5, 0.5 * static_cast<double>(d - 1), eps * eps);
}

std::vector<BoundReport> McBandMass(const SphereSpec& spec, const std::vector<double>& eps,
                                    int64_t n, const Rng& rng) {
  spec.Validate();
  if (n < 10000) throw ConfigError("band mass estimation needs n >= 1e4");
  for (double e : eps) BandComplementBound(spec.d, e);
  Rng hr = rng.Split(kDirectionStream);
  const Tensor h = SampleUniformSphere({spec.d, 1.0}, 1, hr);
  const int64_t shards = NumShards(n);
  const size_t ne = eps.size();
  std::vector<int64_t> counts(shards * ne, 0);
  ParallelFor(shards, [&](int64_t s) {
    Rng r = rng.Split(static_cast<uint64_t>(s));
    const int64_t begin = s * kShard, end = std::min(n, begin + kShard);
    std::vector<double> g(spec.d);
    for (int64_t i = begin; i < end; ++i) {
      r.FillNormal(g.data(), spec.d);
      double dot = 0.0, s2 = 0.0;
      for (int64_t j = 0; j < spec.d; ++j) {
        dot += g[j] * h[j];
        s2 += g[j] * g[j];
      }
      const double c = std::fabs(dot) / std::sqrt(s2);
      for (size_t k = 0; k < ne; ++k) counts[s * ne + k] += c > eps[k];
    }
  });
  std::vector<BoundReport> out;
  for (size_t k = 0; k < ne; ++k) {
    int64_t hits = 0;
    for (int64_t s = 0; s < shards; ++s) hits += counts[s * ne + k];
    BoundReport b;
    b.d = spec.d;
    b.eps = eps[k];
    b.n = n;
    b.mc_mass = static_cast<double>(hits) / static_cast<double>(n);
    b.exact_mass = ExactBandComplement(spec.d, eps[k]);
    b.bound = BandComplementBound(spec.d, eps[k]);
    b.std_err = std::sqrt(b.exact_mass * (1.0 - b.exact_mass) / static_cast<double>(n));
    b.satisfied = b.mc_mass <= b.bound + 3.0 * b.std_err;
    b.agrees = std::fabs(b.mc_mass - b.exact_mass) <= 4.0 * b.std_err;
    out.push_back(b);
  }
  return out;
}

BoundReport McBandMass(const SphereSpec& spec, double eps, int64_t n, const Rng& rng) {
  return McBandMass(spec, std::vector<double>{eps}, n, rng).front();
}

std::vector<MgfResult> GaussianMgfCheck(const std::vector<double>& t, int64_t dof, int64_t n,
                                        const Rng& rng) {
  if (dof < 1) throw ConfigError("chi-square degrees of freedom must be >= 1");
  if (n < 2) throw ConfigError("MGF check needs n >= 2");
  for (double ti : t) {
    if (!(ti >= 0.0)) throw ConfigError("MGF check needs t >= 0");
  }
  const int64_t shards = NumShards(n);
  const size_t nt = t.size();
  std::vector<double> sum(shards * nt, 0.0), sum2(shards * nt, 0.0);
  ParallelFor(shards, [&](int64_t s) {
    Rng r = rng.Split(static_cast<uint64_t>(s));
    const int64_t begin = s * kShard, end = std::min(n, begin + kShard);
    std::vector<double> g(dof);
    for (int64_t i = begin; i < end; ++i) {
      r.FillNormal(g.data(), dof);
      double y = 0.0;
      for (double v : g) y += v * v;
      for (size_t k = 0; k < nt; ++k) {
        // Draw from N(0, I/(1+t)) and reweight by the density ratio to N(0, I).
        const double s2 = 1.0 / (1.0 + t[k]);
        const double e = std::exp(0.5 * static_cast<double>(dof) * std::log(s2) - 0.5 * t[k] * s2 * y);
        sum[s * nt + k] += e;
        sum2[s * nt + k] += e * e;
      }
    }
  });
  std::vector<MgfResult> out;
  const double nn = static_cast<double>(n);
  for (size_t k = 0; k < nt; ++k) {
    double s1 = 0.0, s2 = 0.0;
    for (int64_t s = 0; s < shards; ++s) {
      s1 += sum[s * nt + k];
      s2 += sum2[s * nt + k];
    }
    MgfResult m;
    m.t = t[k];
    m.dof = dof;
    m.mc = s1 / nn;
    const double var = std::max(0.0, (s2 / nn - m.mc * m.mc) * nn / (nn - 1.0));
    m.std_err = std::sqrt(var / nn);
    m.closed_form = std::pow(1.0 + 2.0 * t[k], -0.5 * static_cast<double>(dof));
    m.residual = std::fabs(m.mc - m.closed_form);
    m.ok = m.residual == 0.0 || m.residual < 5.0 * m.std_err;
    out.push_back(m);
  }
  return out;
}

MgfResult GaussianMgfCheck(double t, int64_t dof, int64_t n, const Rng& rng) {
  return GaussianMgfCheck(std::vector<double>{t}, dof, n, rng).front();
}

}  // namespace osnip::geometry
