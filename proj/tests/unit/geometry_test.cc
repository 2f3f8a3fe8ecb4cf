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

#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/geometry/coverage.h"
#include "osnip/geometry/special.h"
#include "osnip/geometry/sphere.h"
#include "osnip/toylm/predictor.h"

namespace osnip::geometry {
namespace {

TEST(IncompleteBetaTest, MatchesBoostOverGrid) {
  int checked = 0;
  for (double a : {0.5, 1.0, 2.5, 10.0, 31.5, 511.5}) {
    for (double b : {0.5, 1.5, 4.0, 31.5, 511.5}) {
      for (double x : {0.0, 1e-6, 0.01, 0.09, 0.3, 0.5, 0.77, 0.99, 1.0}) {
        const double ref = boost::math::ibeta(a, b, x);
        const double refc = boost::math::ibetac(a, b, x);
        EXPECT_NEAR(RegularizedIncompleteBeta(a, b, x), ref, 1e-12 + 1e-10 * ref) << a << ' ' << b << ' ' << x;
        EXPECT_NEAR(RegularizedIncompleteBetaComplement(a, b, x), refc, 1e-300 + 1e-10 * refc)
            << a << ' ' << b << ' ' << x;
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 270);
}

TEST(IncompleteBetaTest, RejectsBadArguments) {
  EXPECT_THROW(RegularizedIncompleteBeta(0.0, 1.0, 0.5), ConfigError);
  EXPECT_THROW(RegularizedIncompleteBeta(1.0, 1.0, 1.5), ConfigError);
}

TEST(BandTest, ClosedFormExamples) {
  EXPECT_NEAR(ExactBandMass(3, 0.5), 0.5, 1e-14);
  EXPECT_NEAR(ExactBandMass(2, 0.5), 1.0 / 3.0, 1e-14);
  for (int64_t d : {2, 5, 64, 1024}) {
    EXPECT_EQ(ExactBandMass(d, 1.0), 1.0);
    EXPECT_EQ(ExactBandMass(d, 0.0), 0.0);
    EXPECT_NEAR(ExactBandMass(d, 0.3) + ExactBandComplement(d, 0.3), 1.0, 1e-14);
  }
  EXPECT_NEAR(BandComplementBound(66, 0.25), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(BandComplementBound(3, 1e-9), 2.0, 1e-12);
  const double b66 = BandComplementBound(66, 0.25);
  EXPECT_NEAR(BandComplementBound(130, 0.25), b66 * b66 / 2.0, 1e-15);
  EXPECT_NEAR(BandComplementBound(64, 0.3), 2.0 * std::exp(-2.79), 1e-12);
  EXPECT_THROW(BandComplementBound(2, 0.5), ConfigError);
  EXPECT_THROW(BandComplementBound(10, 1.0), ConfigError);
}

TEST(BandTest, ExactComplementBelowBound) {
  for (int64_t d : {3, 8, 64, 1024, 4096}) {
    for (double eps : {0.05, 0.1, 0.3, 0.5, 0.9}) {
      EXPECT_LE(ExactBandComplement(d, eps), BandComplementBound(d, eps)) << d << ' ' << eps;
    }
  }
}

TEST(SphereTest, SamplesAreUnitAndIsotropic) {
  Rng rng(5);
  const int64_t n = 100000, d = 64;
  const Tensor u = SampleUniformSphere({d, 2.5}, n, rng);
  const Tensor norms = ops::RowNorms(u);
  for (double v : norms.vec()) ASSERT_NEAR(v, 2.5, 1e-9);
  const Tensor mean = ops::Scale(ops::ColumnSums(u), 1.0 / (2.5 * n));
  for (double v : mean.vec()) EXPECT_LT(std::fabs(v), 4.0 / std::sqrt(static_cast<double>(n)));
  double s = 0.0, s2 = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double x = u.at(i, 0) / 2.5;
    s += x * x;
    s2 += x * x * x * x;
  }
  const double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
  EXPECT_LT(std::fabs(m - 1.0 / d), 5.0 * se);
}

TEST(SphereTest, McBandMassExamples) {
  const Rng rng(9);
  const BoundReport r3 = McBandMass({3, 1.0}, 0.5, 1000000, rng);
  EXPECT_NEAR(r3.mc_mass, 0.5, 0.0015);
  EXPECT_TRUE(r3.agrees);
  const BoundReport r64 = McBandMass({64, 1.0}, 0.3, 1000000, rng);
  EXPECT_LE(r64.mc_mass, r64.bound);
  EXPECT_TRUE(r64.satisfied);
  EXPECT_TRUE(r64.agrees);
  EXPECT_GE(r64.mc_mass, 0.0);
  EXPECT_LE(r64.mc_mass, 1.0);
  EXPECT_THROW(McBandMass({64, 1.0}, 0.3, 100, rng), ConfigError);
}

TEST(SphereTest, McBandMassIsReproducible) {
  const Rng rng(11);
  const auto a = McBandMass({16, 1.0}, std::vector<double>{0.1, 0.2}, 20000, rng);
  const auto b = McBandMass({16, 1.0}, std::vector<double>{0.1, 0.2}, 20000, rng);
  EXPECT_EQ(a[0].mc_mass, b[0].mc_mass);
  EXPECT_EQ(a[1].mc_mass, b[1].mc_mass);
  EXPECT_GE(a[0].mc_mass, a[1].mc_mass);
}

TEST(MgfTest, Examples) {
  const Rng rng(13);
  const MgfResult zero = GaussianMgfCheck(0.0, 7, 1000, rng);
  EXPECT_EQ(zero.mc, 1.0);
  EXPECT_EQ(zero.residual, 0.0);
  EXPECT_TRUE(zero.ok);
  const auto r = GaussianMgfCheck(std::vector<double>{0.5}, 1, 200000, rng);
  EXPECT_NEAR(r[0].closed_form, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(r[0].ok);
  const MgfResult four = GaussianMgfCheck(0.5, 4, 200000, rng);
  EXPECT_NEAR(four.closed_form, 0.25, 1e-15);
  EXPECT_TRUE(four.ok);
  EXPECT_THROW(GaussianMgfCheck(-0.1, 4, 1000, rng), ConfigError);
}

TEST(CoverageTest, DegenerateTolerances) {
  Rng init(2);
  toylm::PredictorModel m = toylm::InitPredictor(toylm::PredictorConfig{}, init);
  m.Freeze();
  const Tensor h = m.Embeddings().Row(3);
  const Rng rng(4);
  EXPECT_EQ(EstimateCoverage(m, h, 1e9, 2000, rng).alpha_hat, 1.0);
  EXPECT_LE(EstimateCoverage(m, h, 0.0, 2000, rng).alpha_hat, 1e-3);
  Tensor p = Tensor::Full({256}, 1.0 / 256.0);
  const CoverageEstimate c = EstimateCoverage(ConstantPointFn(p), h, 0.0, 2000, rng);
  EXPECT_EQ(c.alpha_hat, 1.0);
  EXPECT_EQ(c.std_err, 0.0);
}

TEST(CoverageTest, ConstantPredictorReducesToBand) {
  const Tensor p = Tensor::Full({8}, 0.125);
  Rng hr(6);
  const Tensor h = SampleUniformSphere({64, 3.0}, 1, hr).Reshaped({64});
  const NullspaceCheck c = NullspaceMassCheck(ConstantPointFn(p), h, 0.0, 0.3, 50000, Rng(8));
  EXPECT_EQ(c.alpha_hat, 1.0);
  EXPECT_NEAR(c.sigma_hat, ExactBandMass(64, 0.3), 4.0 * c.std_err + 1e-12);
  EXPECT_NEAR(c.gap, 1.0 - c.sigma_hat, 1e-15);
  EXPECT_TRUE(c.lower_bound_ok);
  EXPECT_TRUE(c.gap_ok);
  EXPECT_GT(c.sigma_hat, 0.0);
}

TEST(CoverageTest, InfiniteToleranceGapIsBandComplement) {
  Rng init(2);
  toylm::PredictorModel m = toylm::InitPredictor(toylm::PredictorConfig{}, init);
  m.Freeze();
  const Tensor h = m.Embeddings().Row(10);
  const NullspaceCheck c = NullspaceMassCheck(m, h, 1e9, 0.3, 20000, Rng(1));
  EXPECT_EQ(c.alpha_hat, 1.0);
  EXPECT_NEAR(c.gap, 1.0 - c.sigma_hat, 1e-15);
  EXPECT_NEAR(c.gap, ExactBandComplement(64, 0.3), 4.0 * c.std_err);
}

TEST(CoverageTest, RejectsNonDistributions) {
  const Tensor bad = Tensor::Full({4}, 0.5);
  const Tensor h = Tensor::Full({8}, 1.0);
  EXPECT_THROW(EstimateCoverage(ConstantPointFn(bad), h, 0.1, 100, Rng(1)), NumericError);
}

TEST(QuantileTest, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(Quantile({3.0, 1.0, 2.0, 4.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(Quantile({5.0}, 0.2), 5.0);
  EXPECT_DOUBLE_EQ(Quantile({0.0, 10.0}, 0.2), 2.0);
}

}  // namespace
}  // namespace osnip::geometry
