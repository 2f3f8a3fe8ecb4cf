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

#include "osnip/attacks/adaptive.h"
#include "osnip/attacks/knn.h"
#include "osnip/attacks/report.h"
#include "osnip/attacks/vocab.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/encryptor/key.h"
#include "osnip/toylm/predictor.h"

namespace osnip::attacks {
namespace {

toylm::PredictorModel Predictor() {
  Rng rng(1);
  toylm::PredictorModel m = toylm::InitPredictor(toylm::PredictorConfig{}, rng);
  m.Freeze();
  return m;
}

std::vector<int64_t> Ids(int64_t n, Rng& rng) {
  std::vector<int64_t> ids(n);
  for (int64_t& t : ids) t = static_cast<int64_t>(rng.UniformInt(256));
  return ids;
}

TEST(KnnTest, IdentityIsFullyRecovered) {
  const toylm::PredictorModel m = Predictor();
  Rng rng(2);
  const std::vector<int64_t> ids = Ids(500, rng);
  const AttackReport r = KnnAttack(m.Embeddings(), toylm::Embed(m, ids), ids, AttackConfig{});
  EXPECT_EQ(r.At(1), 1.0);
  EXPECT_EQ(r.At(5), 1.0);
  EXPECT_EQ(r.At(10), 1.0);
  EXPECT_EQ(r.n, 500);
}

TEST(KnnTest, OtherTokenRowIsAFailure) {
  const toylm::PredictorModel m = Predictor();
  const std::vector<int64_t> ranks = KnnRanks(m.Embeddings(), toylm::Embed(m, {7}), {3});
  EXPECT_GT(ranks[0], 0);
  const std::vector<int64_t> self = KnnRanks(m.Embeddings(), toylm::Embed(m, {7}), {7});
  EXPECT_EQ(self[0], 0);
}

TEST(KnnTest, RandomDirectionsAreAtChance) {
  const toylm::PredictorModel m = Predictor();
  Rng rng(3);
  const int64_t n = 20000;
  const std::vector<int64_t> ids = Ids(n, rng);
  const Tensor h = toylm::Embed(m, ids);
  Tensor u({n, 64});
  rng.FillNormal(u.data(), u.size());
  const Tensor nh = ops::RowNorms(h), nu = ops::RowNorms(u);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < 64; ++j) u.at(i, j) *= nh[i] / nu[i];
  }
  const AttackReport r = KnnAttack(m.Embeddings(), u, ids, AttackConfig{});
  EXPECT_NEAR(r.At(1), 1.0 / 256.0, 4.0 * std::sqrt((1.0 / 256.0) / n) + 0.002);
  EXPECT_LE(r.At(1), r.At(5));
  EXPECT_LE(r.At(5), r.At(10));
}

TEST(KnnTest, TiesGoToLowerId) {
  const Tensor table = Tensor::Matrix(3, 2, {1, 0, 1, 0, 0, 1});
  const Tensor q = Tensor::Matrix(1, 2, {1, 0});
  EXPECT_EQ(KnnRanks(table, q, {0})[0], 0);
  EXPECT_EQ(KnnRanks(table, q, {1})[0], 1);
}

TEST(VocabTest, CleanStreamAtEveryLayer) {
  const toylm::PredictorModel m = Predictor();
  Rng rng(4);
  const std::vector<int64_t> ids = Ids(12, rng);
  for (int64_t layer = 0; layer <= 2; ++layer) {
    AttackConfig cfg;
    cfg.layer = layer;
    const AttackReport r = VocabMatchingAttack(m, {toylm::Embed(m, ids)}, {ids}, {ids[0]}, cfg);
    EXPECT_EQ(r.total_asr, 1.0) << layer;
    EXPECT_TRUE(r.has_clean);
    EXPECT_EQ(r.clean_asr, 1.0);
    EXPECT_EQ(r.At(1), r.total_asr);
  }
}

TEST(VocabTest, SingleCandidate) {
  const toylm::PredictorModel m = Predictor();
  const std::vector<int64_t> ids = {5, 9, 5, 5, 2};
  AttackConfig cfg;
  cfg.candidates = {5};
  const AttackReport r = VocabMatchingAttack(m, {toylm::Embed(m, ids)}, {ids}, {}, cfg);
  EXPECT_DOUBLE_EQ(r.total_asr, 3.0 / 5.0);
}

TEST(VocabTest, PrecomputedModeMatchesAtLayerZero) {
  const toylm::PredictorModel m = Predictor();
  Rng rng(5);
  const std::vector<int64_t> ids = Ids(10, rng);
  AttackConfig cfg;
  cfg.vocab_precomputed = true;
  const AttackReport r = VocabMatchingAttack(m, {toylm::Embed(m, ids)}, {ids}, {}, cfg);
  EXPECT_EQ(r.total_asr, 1.0);
}

TEST(NoiseTest, NormsAndIsotropy) {
  Rng rng(6);
  const int64_t n = 20000;
  Tensor h({n, 64});
  rng.FillNormal(h.data(), h.size());
  std::vector<double> norms(n);
  for (int64_t i = 0; i < n; ++i) norms[i] = 0.5 + 0.001 * i;
  const Tensor d = RandomNoiseDelta(h, norms, rng);
  const Tensor nd = ops::RowNorms(d);
  double cs = 0.0;
  const Tensor nh = ops::RowNorms(h);
  for (int64_t i = 0; i < n; ++i) {
    ASSERT_NEAR(nd[i], norms[i], 1e-12 * norms[i]);
    cs += ops::Dot(h.Row(i), d.Row(i)) / (nh[i] * nd[i]);
  }
  EXPECT_LT(std::fabs(cs / n), 4.0 / std::sqrt(64.0 * n));
  EXPECT_EQ(RandomNoiseControl(h, std::vector<double>(n, 0.0), rng), h);
}

TEST(AdaptiveTest, OracleRecoversDeterministicEncryptor) {
  const toylm::PredictorModel m = Predictor();
  Rng rng(7);
  encryptor::EncryptorModel enc = encryptor::InitEncryptor(encryptor::EncryptorConfig{}, rng);
  for (double& x : enc.params.Mutable("W.2").vec()) x = 0.5 * rng.Normal();
  std::vector<Tensor> inst;
  std::vector<std::vector<int64_t>> ids;
  std::vector<encryptor::SecretKey> keys;
  for (int i = 0; i < 4; ++i) {
    ids.push_back(Ids(10, rng));
    keys.push_back(encryptor::SecretKey::Random(rng));
    inst.push_back(encryptor::Encrypt(enc, toylm::Embed(m, ids.back()), keys.back()));
  }
  const AttackReport o =
      AdaptiveKeyAttack(enc, m.Embeddings(), inst, ids, keys, KeyMode::kOracle, Rng(8), AttackConfig{});
  EXPECT_EQ(o.At(1), 1.0);
  EXPECT_EQ(o.attack, "adaptive-oracle");
  const AttackReport r =
      AdaptiveKeyAttack(enc, m.Embeddings(), inst, ids, keys, KeyMode::kRandom, Rng(8), AttackConfig{});
  EXPECT_EQ(r.attack, "adaptive-random");
  const AttackReport again =
      AdaptiveKeyAttack(enc, m.Embeddings(), inst, ids, keys, KeyMode::kRandom, Rng(8), AttackConfig{});
  EXPECT_EQ(again.At(1), r.At(1));
}

TEST(ReportTest, CsvAndParsing) {
  AttackReport r;
  r.model = "osnip";
  r.attack = "knn";
  r.asr = {{1, 0.5}, {5, 0.75}};
  r.n = 4;
  const std::string csv = ReportsCsv({r});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kReportCsvHeader);
  EXPECT_NE(csv.find("osnip,knn,0,5,0.75,,4"), std::string::npos);
  EXPECT_EQ(ParseKeyMode("oracle"), KeyMode::kOracle);
  EXPECT_EQ(KeyModeName(KeyMode::kRandom), "random");
  EXPECT_THROW(ParseKeyMode("psychic"), ConfigError);
  AttackConfig bad;
  bad.top_k = {0};
  EXPECT_THROW(bad.Validate(), ConfigError);
  EXPECT_THROW(r.At(10), ConfigError);
}

}  // namespace
}  // namespace osnip::attacks
