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

#include "osnip/trainer/trainer.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"
#include "osnip/encryptor/key.h"
#include "osnip/trainer/checkpoint.h"

namespace osnip::trainer {
namespace {

constexpr uint64_t kTrainStream = 21;
constexpr int kLogColumns = 9;

AdamConfig OptimizerConfig(const TrainConfig& c) {
  AdamConfig a;
  a.lr = c.learning_rate;
  a.adaptive = c.optimizer == Optimizer::kAdam;
  return a;
}

std::vector<double> RowValues(const LogRow& r) {
  const objectives::LossBreakdown& b = r.loss;
  return {static_cast<double>(r.step), b.util, b.priv, b.div, b.total,
          b.w_time, b.w_safe, b.eff_lambda1, b.eff_lambda2};
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (steps < 0) throw ConfigError("train.steps must be >= 0");
  if (batch_size < 1 || window < 2) throw ConfigError("train.batch_size >= 1 and window >= 2 required");
  if (keys_per_batch < 2) throw ConfigError("train.keys_per_batch must be >= 2");
  if (checkpoint_every < 0) throw ConfigError("train.checkpoint_every must be >= 0");
}

std::string TrainLog::ToCsv() const {
  std::ostringstream os;
  os << "step,util,priv,div,total,w_time,w_safe,lambda1_eff,lambda2_eff\n";
  for (const LogRow& r : rows) {
    const objectives::LossBreakdown& b = r.loss;
    os << r.step << ',' << FormatDouble(b.util) << ',' << FormatDouble(b.priv) << ','
       << FormatDouble(b.div) << ',' << FormatDouble(b.total) << ',' << FormatDouble(b.w_time) << ','
       << FormatDouble(b.w_safe) << ',' << FormatDouble(b.eff_lambda1) << ','
       << FormatDouble(b.eff_lambda2) << '\n';
  }
  return os.str();
}

double DiversityMargin(const Tensor& embeddings, double scale) {
  if (!(scale > 0.0)) throw ConfigError("diversity margin scale must be > 0");
  std::vector<double> n = ops::RowNorms(embeddings).vec();
  std::sort(n.begin(), n.end());
  const size_t m = n.size();
  const double med = m % 2 ? n[m / 2] : 0.5 * (n[m / 2 - 1] + n[m / 2]);
  return scale * med;
}

EncryptorTrainer::EncryptorTrainer(const toylm::PredictorModel& predictor,
                                   encryptor::EncryptorModel init, const toylm::ToyCorpus& corpus,
                                   TrainConfig tcfg, objectives::CurriculumConfig ccfg)
    : predictor_(predictor),
      enc_(std::move(init)),
      corpus_(corpus),
      tcfg_(std::move(tcfg)),
      ccfg_(ccfg),
      opt_(OptimizerConfig(tcfg_)),
      rng_(Rng(tcfg_.seed).Split(kTrainStream)) {
  tcfg_.Validate();
  ccfg_.Validate();
  if (!predictor_.frozen) throw ConfigError("encryptor training needs a frozen predictor");
  if (enc_.config.dim != predictor_.config.embed_dim) {
    throw ConfigError("encryptor and predictor dimensions differ");
  }
  for (size_t i = 0; i < corpus_.size(); ++i) {
    if (static_cast<int64_t>(corpus_.sequences[i].size()) >= tcfg_.window) eligible_.push_back(i);
  }
  if (eligible_.empty()) throw ConfigError("no training sequence is as long as the window");
  predictor_hash_ = toylm::ParamHash(predictor_.params);
}

const LogRow& EncryptorTrainer::Step() {
  const int64_t w = tcfg_.window;
  std::vector<int64_t> ids;
  ids.reserve(tcfg_.batch_size * w);
  for (int64_t b = 0; b < tcfg_.batch_size; ++b) {
    const auto& s = corpus_.sequences[eligible_[rng_.UniformInt(eligible_.size())]];
    const int64_t start = static_cast<int64_t>(rng_.UniformInt(s.size() - w + 1));
    ids.insert(ids.end(), s.begin() + start, s.begin() + start + w);
  }
  std::vector<encryptor::SecretKey> keys;
  while (static_cast<int64_t>(keys.size()) < tcfg_.keys_per_batch) {
    const encryptor::SecretKey k = encryptor::SecretKey::Random(rng_);
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  std::vector<Tensor> key_embs;
  for (const auto& k : keys) key_embs.push_back(encryptor::ExpandKey(k, enc_.config.key_dim));

  std::vector<int64_t> uniq = ids;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<int64_t> rows(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    rows[i] = std::lower_bound(uniq.begin(), uniq.end(), ids[i]) - uniq.begin();
  }
  const Tensor h = ops::GatherRows(predictor_.Embeddings(), uniq);
  const std::vector<int64_t> lengths(tcfg_.batch_size, w);

  const objectives::TotalLossResult res =
      objectives::TotalLoss(predictor_, enc_, h, lengths, key_embs, step_, ccfg_, &gate_, &rows);
  if (!std::isfinite(res.breakdown.total)) {
    throw NumericError("encryptor training loss is not finite at step " + std::to_string(step_));
  }
  if (res.breakdown.floored) {
    spdlog::warn("step {}: encrypted distribution hit the probability floor", step_);
  }
  const auto grads = Grad(res.total, enc_.params);
  for (const auto& [name, g] : grads) {
    if (!g.IsFinite()) {
      throw NumericError("non-finite gradient for '" + name + "' at step " + std::to_string(step_));
    }
  }
  opt_.Step(enc_.params, grads);
  log_.rows.push_back({step_, res.breakdown});
  if (step_ % 500 == 0) {
    const auto& b = res.breakdown;
    spdlog::debug("step {} util {:.4f} priv {:.4f} div {:.4f} total {:.4f} w_safe {:.2f}", step_,
                  b.util, b.priv, b.div, b.total, b.w_safe);
  }
  ++step_;
  return log_.rows.back();
}

void EncryptorTrainer::Run(int64_t until) {
  if (until < 0) until = tcfg_.steps;
  while (step_ < until) {
    Step();
    if (tcfg_.checkpoint_every > 0 && !tcfg_.checkpoint_dir.empty() &&
        step_ % tcfg_.checkpoint_every == 0) {
      SaveCheckpoint(*this, tcfg_.checkpoint_dir + "/encryptor_step" + std::to_string(step_) + ".ckpt");
    }
  }
}

void EncryptorTrainer::AssertPredictorFrozen() const {
  if (toylm::ParamHash(predictor_.params) != predictor_hash_) {
    throw Error("frozen predictor parameters changed during encryptor training");
  }
}

Container EncryptorTrainer::Checkpoint() const {
  AssertPredictorFrozen();
  Container c;
  c.meta["schema"] = kCheckpointSchema;
  c.meta["kind"] = "encryptor-trainer";
  c.meta["dims"] = {{"d", predictor_.config.embed_dim}, {"vocab", predictor_.config.vocab_size}};
  c.meta["step"] = step_;
  c.meta["rng"] = rng_.State();
  c.meta["gate"] = {{"initialized", gate_.initialized()}, {"ema", gate_.ema()}};
  c.meta["predictor_hash"] = predictor_hash_;
  c.meta["train"] = TrainConfigJson(tcfg_);
  c.meta["curriculum"] = CurriculumJson(ccfg_);
  PackEncryptor(enc_, c);
  opt_.Pack("adam/", c);
  if (!log_.rows.empty()) {
    Tensor log({static_cast<int64_t>(log_.rows.size()), kLogColumns});
    for (size_t i = 0; i < log_.rows.size(); ++i) {
      const std::vector<double> v = RowValues(log_.rows[i]);
      std::copy(v.begin(), v.end(), log.data() + i * kLogColumns);
    }
    c.tensors.emplace_back("log", log);
  }
  return c;
}

void EncryptorTrainer::Restore(const Container& c) {
  try {
    if (c.meta.at("kind").get<std::string>() != "encryptor-trainer") {
      throw CorruptHeaderError("not an encryptor training checkpoint");
    }
    if (c.meta.at("schema").get<int>() != kCheckpointSchema) {
      throw VersionMismatchError("unsupported checkpoint schema");
    }
    if (c.meta.at("predictor_hash").get<std::string>() != predictor_hash_) {
      throw ConfigError("checkpoint was trained against a different predictor");
    }
    if (c.meta.at("train") != TrainConfigJson(tcfg_) || c.meta.at("curriculum") != CurriculumJson(ccfg_)) {
      throw ConfigError("checkpoint configuration differs from the trainer's");
    }
    enc_ = encryptor::UnpackEncryptor(c);
    opt_ = Adam(OptimizerConfig(tcfg_));
    opt_.Unpack(c, "adam/");
    rng_ = Rng::FromState(c.meta.at("rng").get<std::vector<uint64_t>>());
    gate_.Restore(c.meta.at("gate").at("initialized").get<bool>(), c.meta.at("gate").at("ema").get<double>());
    step_ = c.meta.at("step").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptHeaderError(std::string("bad training checkpoint header: ") + e.what());
  }
  log_.rows.clear();
  if (step_ > 0) {
    const Tensor& log = c.Find("log");
    if (log.rank() != 2 || log.cols() != kLogColumns || log.rows() != step_) {
      throw CorruptHeaderError("training checkpoint log does not match its step");
    }
    for (int64_t i = 0; i < log.rows(); ++i) {
      const double* v = log.data() + i * kLogColumns;
      LogRow r;
      r.step = static_cast<int64_t>(v[0]);
      r.loss = {v[1], v[2], v[3], v[4], v[7], v[8], v[5], v[6], false};
      log_.rows.push_back(r);
    }
  }
}

TrainResult TrainEncryptor(const toylm::PredictorModel& predictor, const encryptor::EncryptorModel& init,
                           const toylm::ToyCorpus& corpus, const TrainConfig& tcfg,
                           const objectives::CurriculumConfig& ccfg) {
  EncryptorTrainer t(predictor, init, corpus, tcfg, ccfg);
  t.Run();
  t.AssertPredictorFrozen();
  return {t.model(), t.log()};
}

}  // namespace osnip::trainer
