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

#include "osnip/trainer/checkpoint.h"

#include "osnip/diffmath/errors.h"

namespace osnip::trainer {

void SaveCheckpoint(const EncryptorTrainer& t, const std::string& path) {
  SaveContainer(t.Checkpoint(), path);
}

void LoadCheckpoint(EncryptorTrainer& t, const std::string& path) {
  t.Restore(LoadContainer(path));
}

nlohmann::json TrainConfigJson(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"steps", c.steps},
          {"batch_size", c.batch_size},
          {"window", c.window},
          {"seed", c.seed},
          {"keys_per_batch", c.keys_per_batch},
          {"optimizer", c.optimizer == Optimizer::kAdam ? "adam" : "sgd"},
          {"checkpoint_every", c.checkpoint_every}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.learning_rate = j.at("learning_rate").get<double>();
    c.steps = j.at("steps").get<int64_t>();
    c.batch_size = j.at("batch_size").get<int64_t>();
    c.window = j.at("window").get<int64_t>();
    c.seed = j.at("seed").get<uint64_t>();
    c.keys_per_batch = j.at("keys_per_batch").get<int64_t>();
    const std::string opt = j.at("optimizer").get<std::string>();
    if (opt != "adam" && opt != "sgd") throw ConfigError("unknown optimizer '" + opt + "'");
    c.optimizer = opt == "adam" ? Optimizer::kAdam : Optimizer::kSgd;
    c.checkpoint_every = j.at("checkpoint_every").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptHeaderError(std::string("bad train config: ") + e.what());
  }
  return c;
}

nlohmann::json CurriculumJson(const objectives::CurriculumConfig& c) {
  return {{"lambda1_base", c.lambda1_base}, {"lambda2_base", c.lambda2_base},
          {"eps", c.eps_margin},            {"margin_div", c.margin_div},
          {"warmup_steps", c.warmup_steps}, {"tau_low", c.tau_low},
          {"tau_high", c.tau_high},         {"gate_ema", c.gate_ema}};
}

objectives::CurriculumConfig CurriculumFromJson(const nlohmann::json& j) {
  objectives::CurriculumConfig c;
  try {
    c.lambda1_base = j.at("lambda1_base").get<double>();
    c.lambda2_base = j.at("lambda2_base").get<double>();
    c.eps_margin = j.at("eps").get<double>();
    c.margin_div = j.at("margin_div").get<double>();
    c.warmup_steps = j.at("warmup_steps").get<int64_t>();
    c.tau_low = j.at("tau_low").get<double>();
    c.tau_high = j.at("tau_high").get<double>();
    c.gate_ema = j.at("gate_ema").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptHeaderError(std::string("bad curriculum config: ") + e.what());
  }
  return c;
}

}  // namespace osnip::trainer
