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

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/evalsuite/stats.h"
#include "osnip/evalsuite/sweeps.h"
#include "osnip/evalsuite/trajectory.h"
#include "osnip/evalsuite/utility.h"
#include "osnip/geometry/sphere.h"

namespace osnip::evalsuite {
namespace {

struct World {
  toylm::ToyCorpus corpus = toylm::GenerateCorpus(toylm::CorpusSpec{}, 40);
  toylm::PredictorModel pred;
  encryptor::EncryptorModel identity;
  World() {
    Rng rng(1);
    pred = toylm::InitPredictor(toylm::PredictorConfig{}, rng);
    pred.Freeze();
    identity = encryptor::InitEncryptor(encryptor::EncryptorConfig{}, rng);
  }
};

TEST(StatsTest, RanksAndCorrelations) {
  EXPECT_EQ(AverageRanks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
  EXPECT_DOUBLE_EQ(Spearman({1, 2, 3, 4}, {1, 4, 9, 16}), 1.0);
  EXPECT_DOUBLE_EQ(Spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_TRUE(std::isnan(Spearman({1, 2, 3}, {5, 5, 5})));
  EXPECT_NEAR(Pearson({1, 2, 3}, {2, 4, 7}), 0.9933992677987828, 1e-14);
  EXPECT_DOUBLE_EQ(Median({3, 1, 2, 10}), 2.5);
  EXPECT_DOUBLE_EQ(Mean({1, 2, 3}), 2.0);
}

TEST(StatsTest, ParetoFrontier) {
  const std::vector<bool> f = ParetoFrontier({0.1, 0.2, 0.05, 0.3}, {0.9, 0.95, 0.8, 0.7});
  EXPECT_EQ(f, (std::vector<bool>{true, true, true, false}));
}

TEST(UtilityTest, NoneAndIdentityAgree) {
  const World w;
  const Rng rng(2);
  const UtilityReport none = UtilityEval(w.pred, nullptr, w.corpus, rng, 0.15);
  const UtilityReport id = UtilityEval(w.pred, &w.identity, w.corpus, rng, 0.15);
  EXPECT_EQ(none.encrypted_ppl, id.encrypted_ppl);
  EXPECT_EQ(none.encrypted_accuracy, id.encrypted_accuracy);
  EXPECT_EQ(id.ppl_ratio, 1.0);
  if (id.clean_accuracy > 0.0) {
    EXPECT_EQ(id.retained_performance, 1.0);
  }
  EXPECT_EQ(id.kl_mean, 0.0);
  EXPECT_NEAR(id.cos_abs_mean, 1.0, 1e-12);
  EXPECT_EQ(id.cos_band_fraction, 0.0);
}

TEST(UtilityTest, InstancesUseDistinctKeys) {
  const World w;
  const InstanceSet s = BuildInstances(w.pred, &w.identity, w.corpus, 4, 3, Rng(3));
  ASSERT_EQ(s.perturbed.size(), 12u);
  EXPECT_NE(s.keys[0], s.keys[1]);
  EXPECT_EQ(s.keys[0], InstanceKey(Rng(3), 0, 0));
  EXPECT_EQ(s.keys[4], InstanceKey(Rng(3), 1, 1));
  EXPECT_EQ(s.source[5], 1);
  EXPECT_EQ(s.StackedPerturbed().rows(), static_cast<int64_t>(s.StackedIds().size()));
}

TEST(CosineSweepTest, PerturbHitsLevel) {
  Rng rng(4);
  Tensor h({30, 64});
  rng.FillNormal(h.data(), h.size());
  for (double level : {0.0, 0.3, 0.7, 1.0}) {
    const Tensor z = CosineLevelPerturb(h, level, rng);
    for (int64_t i = 0; i < 30; ++i) {
      const double nh = ops::Norm(h.Row(i)), nz = ops::Norm(z.Row(i));
      EXPECT_NEAR(nz, nh, 1e-12 * nh);
      EXPECT_NEAR(ops::Dot(h.Row(i), z.Row(i)) / (nh * nz), level, 1e-9);
    }
  }
  EXPECT_EQ(CosineLevelPerturb(h, 1.0, rng), h);
}

TEST(CosineSweepTest, FullLevelIsFullyRecovered) {
  const World w;
  attacks::AttackConfig ac;
  const CosineSweep s = CosineAsrSweep(w.pred, w.corpus, {0.0, 0.5, 1.0}, {0, 1}, 20, 4, ac, Rng(5));
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.points.back().asr_knn_top10, 1.0);
  EXPECT_EQ(s.points.back().asr_vocab_total, 1.0);
  EXPECT_LE(s.points.front().asr_knn_top10, s.points.back().asr_knn_top10);
  for (const SweepPoint& p : s.points) EXPECT_LT(p.cos_error, 1e-9);
}

TEST(TrajectoryTest, IdentityIsPerfectlySimilar) {
  const World w;
  const Tensor h = toylm::Embed(w.pred, w.corpus.sequences[0]);
  const TrajectoryReport r = LayerTrajectory(w.pred, h, encryptor::Encrypt(w.identity, h, encryptor::SecretKey{}), 4);
  ASSERT_EQ(r.cos.size(), 3u);
  for (const auto& layer : r.cos) {
    ASSERT_EQ(layer.size(), w.corpus.sequences[0].size() + 4);
    for (double c : layer) EXPECT_NEAR(c, 1.0, 1e-12);
  }
  EXPECT_EQ(r.clean_tokens, r.perturbed_tokens);
  EXPECT_EQ(r.clean_tokens, GreedyDecode(w.pred, h, 4));
}

TEST(TrajectoryTest, LayerZeroIsInputCosine) {
  const World w;
  const Tensor h = toylm::Embed(w.pred, w.corpus.sequences[1]);
  Rng rng(6);
  const Tensor z = CosineLevelPerturb(h, 0.4, rng);
  const TrajectoryReport r = LayerTrajectory(w.pred, h, z, 3);
  for (int64_t t = 0; t < h.rows(); ++t) EXPECT_NEAR(r.cos[0][t], 0.4, 1e-9);
  const std::string csv = TrajectoryCsv({r});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "prompt,layer,position,phase,cos");
}

TEST(NoiseControlTest, IdentityEncryptorHasZeroNoise) {
  const World w;
  std::vector<std::vector<int64_t>> prompts(w.corpus.sequences.begin(), w.corpus.sequences.begin() + 3);
  std::vector<encryptor::SecretKey> keys;
  for (int i = 0; i < 3; ++i) keys.push_back(InstanceKey(Rng(7), i));
  const NoiseControlResult r = NoiseControl(w.pred, w.identity, prompts, keys, Rng(8), 2);
  EXPECT_EQ(r.encryptor_kl_mean, 0.0);
  EXPECT_EQ(r.noise_kl_mean, 0.0);
  EXPECT_THROW(NoiseControl(w.pred, w.identity, prompts, {}, Rng(8), 2), ConfigError);
}

TEST(SweepTest, CsvAndFrontier) {
  std::vector<SweepPoint> pts(3);
  pts[0].asr_knn_top10 = 0.1;
  pts[0].retained_performance = 0.9;
  pts[1].asr_knn_top10 = 0.2;
  pts[1].retained_performance = 0.8;
  pts[2].asr_knn_top10 = 0.05;
  pts[2].retained_performance = 0.95;
  MarkFrontier(pts);
  EXPECT_FALSE(pts[0].frontier);
  EXPECT_FALSE(pts[1].frontier);
  EXPECT_TRUE(pts[2].frontier);
  const std::string csv = SweepCsv(pts);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "control,control2,asr_knn_top10,asr_vocab_total,asr_vocab_clean,retained_performance,"
            "ppl_ratio,bound,cos_error,frontier");
}

TEST(SweepTest, BoundColumnDecreasesWithDimension) {
  double prev = 3.0;
  for (int64_t d : {16, 32, 64, 128, 256}) {
    const double b = geometry::BandComplementBound(d, 0.1);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

}  // namespace
}  // namespace osnip::evalsuite
