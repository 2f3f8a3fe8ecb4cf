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
#include <filesystem>

#include "osnip/diffmath/container.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"
#include "osnip/trainer/checkpoint.h"
#include "osnip/trainer/trainer.h"

namespace osnip::trainer {
namespace {

struct World {
  toylm::ToyCorpus corpus = toylm::GenerateCorpus(toylm::CorpusSpec{}, 60);
  toylm::PredictorModel pred;
  encryptor::EncryptorModel enc;
  TrainConfig tcfg;
  objectives::CurriculumConfig ccfg;

  World() {
    Rng rng(1);
    pred = toylm::InitPredictor(toylm::PredictorConfig{}, rng);
    pred.Freeze();
    enc = encryptor::InitEncryptor(encryptor::EncryptorConfig{}, rng);
    tcfg.steps = 12;
    tcfg.batch_size = 3;
    tcfg.window = 16;
    ccfg.warmup_steps = 4;
    ccfg.margin_div = DiversityMargin(pred.Embeddings(), 1.4);
  }
};

TEST(TrainerTest, RequiresFrozenPredictor) {
  World w;
  toylm::PredictorModel loose = w.pred;
  loose.frozen = false;
  EXPECT_THROW(EncryptorTrainer(loose, w.enc, w.corpus, w.tcfg, w.ccfg), ConfigError);
  TrainConfig one = w.tcfg;
  one.keys_per_batch = 1;
  EXPECT_THROW(EncryptorTrainer(w.pred, w.enc, w.corpus, one, w.ccfg), ConfigError);
}

TEST(TrainerTest, IdentityStartAndFrozenPredictor) {
  World w;
  const std::string before = toylm::ParamHash(w.pred.params);
  const TrainResult r = TrainEncryptor(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  ASSERT_EQ(r.log.rows.size(), 12u);
  EXPECT_NEAR(r.log.rows[0].loss.util, 0.0, 1e-12);
  EXPECT_NEAR(r.log.rows[0].loss.priv, 1.0 - w.ccfg.eps_margin, 1e-12);
  EXPECT_EQ(toylm::ParamHash(w.pred.params), before);
  for (const LogRow& row : r.log.rows) {
    const auto& b = row.loss;
    EXPECT_NEAR(b.total, b.util + b.eff_lambda1 * b.priv + b.eff_lambda2 * b.div, 1e-12);
  }
  EXPECT_NE(r.model.params.Get("W.2"), w.enc.params.Get("W.2"));
}

TEST(TrainerTest, DeterministicForSeed) {
  World w;
  const TrainResult a = TrainEncryptor(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  const TrainResult b = TrainEncryptor(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  EXPECT_EQ(a.log.ToCsv(), b.log.ToCsv());
  TrainConfig other = w.tcfg;
  other.seed = 7;
  const TrainResult c = TrainEncryptor(w.pred, w.enc, w.corpus, other, w.ccfg);
  EXPECT_NE(a.log.ToCsv(), c.log.ToCsv());
}

TEST(TrainerTest, ResumeEqualsUninterrupted) {
  World w;
  EncryptorTrainer full(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  full.Run();

  EncryptorTrainer first(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  first.Run(5);
  const std::string bytes = SerializeContainer(first.Checkpoint());
  EncryptorTrainer resumed(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  resumed.Restore(ParseContainer(bytes));
  EXPECT_EQ(resumed.step(), 5);
  resumed.Run();
  EXPECT_EQ(resumed.log().ToCsv(), full.log().ToCsv());
  EXPECT_EQ(SerializeContainer(resumed.Checkpoint()), SerializeContainer(full.Checkpoint()));
}

TEST(TrainerTest, CheckpointSaveLoadSaveIsByteIdentical) {
  World w;
  EncryptorTrainer t(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  t.Run(3);
  const auto dir = std::filesystem::temp_directory_path() / "osnip_trainer_test";
  std::filesystem::create_directories(dir);
  const std::string p1 = (dir / "a.ckpt").string(), p2 = (dir / "b.ckpt").string();
  SaveCheckpoint(t, p1);
  EncryptorTrainer u(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  LoadCheckpoint(u, p1);
  SaveCheckpoint(u, p2);
  EXPECT_EQ(ReadFile(p1), ReadFile(p2));
  for (const std::string& n : t.model().params.Names()) {
    EXPECT_EQ(u.model().params.Get(n), t.model().params.Get(n));
  }
  const std::string bytes = ReadFile(p1);
  WriteFile(p2, bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(LoadCheckpoint(u, p2), TruncatedError);
  std::filesystem::remove_all(dir);
}

TEST(TrainerTest, RejectsCheckpointFromOtherPredictor) {
  World w;
  EncryptorTrainer t(w.pred, w.enc, w.corpus, w.tcfg, w.ccfg);
  t.Run(2);
  const Container c = t.Checkpoint();
  World other;
  Rng rng(99);
  other.pred = toylm::InitPredictor(toylm::PredictorConfig{}, rng);
  other.pred.Freeze();
  EncryptorTrainer u(other.pred, other.enc, other.corpus, other.tcfg, other.ccfg);
  EXPECT_ANY_THROW(u.Restore(c));
}

TEST(TrainerTest, PeriodicCheckpointsWritten) {
  World w;
  const auto dir = std::filesystem::temp_directory_path() / "osnip_trainer_periodic";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  TrainConfig tc = w.tcfg;
  tc.checkpoint_every = 4;
  tc.checkpoint_dir = dir.string();
  EncryptorTrainer t(w.pred, w.enc, w.corpus, tc, w.ccfg);
  t.Run();
  EXPECT_TRUE(std::filesystem::exists(dir / "encryptor_step4.ckpt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "encryptor_step12.ckpt"));
  std::filesystem::remove_all(dir);
}

TEST(TrainerTest, ConfigJsonRoundTrip) {
  TrainConfig t;
  t.learning_rate = 1e-2;
  t.optimizer = Optimizer::kSgd;
  const TrainConfig back = TrainConfigFromJson(TrainConfigJson(t));
  EXPECT_EQ(TrainConfigJson(back), TrainConfigJson(t));
  objectives::CurriculumConfig c;
  c.tau_low = 0.01;
  EXPECT_EQ(CurriculumJson(CurriculumFromJson(CurriculumJson(c))), CurriculumJson(c));
}

TEST(TrainerTest, LogCsvHeader) {
  TrainLog log;
  log.rows.push_back({});
  const std::string csv = log.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,util,priv,div,total,w_time,w_safe,lambda1_eff,lambda2_eff");
}

TEST(TrainerTest, DiversityMarginIsScaledMedianNorm) {
  const Tensor e = Tensor::Matrix(3, 2, {3, 4, 0, 1, 6, 8});
  EXPECT_DOUBLE_EQ(DiversityMargin(e, 1.4), 7.0);
}

}  // namespace
}  // namespace osnip::trainer
