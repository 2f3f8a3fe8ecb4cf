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

#include "osnip/geometry/coverage.h"

#include <algorithm>
#include <cmath>

#include "osnip/diffmath/autodiff.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"
#include "osnip/geometry/sphere.h"

namespace osnip::geometry {
namespace {

constexpr int64_t kChunk = 2048;

void CheckDistributions(const Tensor& p, int64_t rows) {
  if (p.rank() != 2 || p.rows() != rows) {
    throw NumericError("predictor output has shape " + ShapeString(p.shape()));
  }
  for (int64_t i = 0; i < p.rows(); ++i) {
    double s = 0.0;
    for (int64_t j = 0; j < p.cols(); ++j) {
      const double v = p.at(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError("predictor output is not a distribution");
      s += v;
    }
    if (std::fabs(s - 1.0) > 1e-9) throw NumericError("predictor output does not sum to 1");
  }
}

double BinomialStdErr(double p, int64_t n) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

}  // namespace

DistributionFn PredictorPointFn(const toylm::PredictorModel& m) {
  return [&m](const Tensor& points) {
    const std::vector<int64_t> lengths(points.rows(), 1);
    return ops::SoftmaxRows(toylm::Forward(m, ad::Constant(points), lengths).logits->value);
  };
}

DistributionFn ConstantPointFn(const Tensor& p) {
  const Tensor row = p.Reshaped({p.size()});
  return [row](const Tensor& points) { return ops::BroadcastRow(row, points.rows()); };
}

DirectionalSample SampleDirections(const DistributionFn& f, const Tensor& h, int64_t n, const Rng& rng) {
  if (n < 1) throw ConfigError("direction count must be >= 1");
  const Tensor hv = h.Reshaped({h.size()});
  const double r = ops::Norm(hv);
  if (!(r > 0.0)) throw ConfigError("coverage needs a nonzero embedding");
  const int64_t d = hv.size();
  const Tensor p = f(hv.Reshaped({1, d}));
  CheckDistributions(p, 1);

  DirectionalSample out;
  out.kl.resize(n);
  out.cos.resize(n);
  const int64_t chunks = (n + kChunk - 1) / kChunk;
  ParallelFor(chunks, [&](int64_t c) {
    Rng cr = rng.Split(static_cast<uint64_t>(c));
    const int64_t begin = c * kChunk, m = std::min(n, begin + kChunk) - begin;
    const Tensor pts = SampleUniformSphere({d, r}, m, cr);
    const Tensor q = f(pts);
    CheckDistributions(q, m);
    const Tensor kl = ops::KlRows(ops::BroadcastRow(p.Reshaped({p.size()}), m), q);
    for (int64_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (int64_t j = 0; j < d; ++j) dot += pts.at(i, j) * hv[j];
      out.kl[begin + i] = kl[i];
      out.cos[begin + i] = dot / (r * r);
    }
  });
  return out;
}

CoverageEstimate EstimateCoverage(const DistributionFn& f, const Tensor& h, double delta_util,
                                  int64_t n, const Rng& rng) {
  if (!(delta_util >= 0.0)) throw ConfigError("delta_util must be >= 0");
  const DirectionalSample s = SampleDirections(f, h, n, rng);
  int64_t hits = 0;
  for (double kl : s.kl) hits += kl <= delta_util;
  CoverageEstimate e;
  e.n = n;
  e.alpha_hat = static_cast<double>(hits) / static_cast<double>(n);
  e.std_err = BinomialStdErr(e.alpha_hat, n);
  return e;
}

CoverageEstimate EstimateCoverage(const toylm::PredictorModel& m, const Tensor& h,
                                  double delta_util, int64_t n, const Rng& rng) {
  return EstimateCoverage(PredictorPointFn(m), h, delta_util, n, rng);
}

NullspaceCheck NullspaceMassCheck(const DistributionFn& f, const Tensor& h, double delta_util,
                                  double eps, int64_t n, const Rng& rng) {
  if (!(delta_util >= 0.0)) throw ConfigError("delta_util must be >= 0");
  NullspaceCheck c;
  c.bound = BandComplementBound(h.size(), eps);
  const DirectionalSample s = SampleDirections(f, h, n, rng);
  int64_t covered = 0, both = 0, outside = 0;
  for (int64_t i = 0; i < n; ++i) {
    if (!(s.kl[i] <= delta_util)) continue;
    ++covered;
    if (std::fabs(s.cos[i]) <= eps) {
      ++both;
    } else {
      ++outside;
    }
  }
  const double nn = static_cast<double>(n);
  c.n = n;
  c.alpha_hat = covered / nn;
  c.sigma_hat = both / nn;
  c.gap = outside / nn;
  c.std_err = std::max({BinomialStdErr(c.alpha_hat, n), BinomialStdErr(c.sigma_hat, n),
                        BinomialStdErr(c.gap, n)});
  const double diff = c.alpha_hat - c.sigma_hat;
  c.lower_bound_ok = c.sigma_hat >= c.alpha_hat - c.bound - 3.0 * c.std_err;
  c.gap_ok = diff >= 0.0 && diff <= c.bound + 3.0 * c.std_err;
  return c;
}

NullspaceCheck NullspaceMassCheck(const toylm::PredictorModel& m, const Tensor& h,
                                  double delta_util, double eps, int64_t n, const Rng& rng) {
  return NullspaceMassCheck(PredictorPointFn(m), h, delta_util, eps, n, rng);
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(values.size() - 1, lo + 1);
  const double w = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

}  // namespace osnip::geometry
