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

// Run configuration: an INI document with one section per module. Every key
// has a default; unknown sections or keys are rejected.

#ifndef OSNIP_CLI_CONFIG_H_
#define OSNIP_CLI_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "osnip/attacks/report.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/objectives/curriculum.h"
#include "osnip/toylm/corpus.h"
#include "osnip/toylm/predictor.h"
#include "osnip/toylm/train.h"
#include "osnip/trainer/trainer.h"

namespace osnip::cli {

inline constexpr int kConfigSchema = 1;

struct GeometryConfig {
  std::vector<int64_t> dims = {8, 16, 64, 256, 1024};
  std::vector<double> eps = {0.1, 0.2, 0.3, 0.5};
  int64_t samples = 1000000;
  std::vector<double> mgf_t = {0.1, 0.5, 1.0};
  std::vector<int64_t> mgf_dof = {1, 4, 63};
  int64_t mgf_samples = 1000000;
  double existence_eps = 0.3;
  double existence_quantile = 0.2;
  int64_t existence_pilot = 10000;
  int64_t existence_samples = 100000;
};

struct EvalConfig {
  int64_t sequences = 200;
  int64_t replicas = 5;
  int64_t vocab_sequences = 60;
  std::vector<int64_t> vocab_layers = {0, 1, 2};
  int64_t trajectory_prompts = 50;
  int64_t generate = 16;
};

struct SweepConfig {
  std::vector<double> cos_levels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int64_t cos_sequences = 200;
  int64_t cos_vocab_layer = 1;
  std::vector<int64_t> dims = {16, 64, 256};
  std::vector<double> lambda1_grid = {10.0, 30.0, 60.0};
  std::vector<double> eps_grid = {0.1, 0.2, 0.3};
  int64_t train_steps = 1500;
};

struct RunConfig {
  uint64_t seed = 42;
  int threads = 0;  // 0 uses the hardware concurrency
  int64_t corpus_sequences = 3750;
  toylm::CorpusSpec corpus;
  toylm::PredictorConfig predictor;
  toylm::PredictorTrainConfig predictor_train;
  encryptor::EncryptorConfig encryptor;
  trainer::TrainConfig train;
  objectives::CurriculumConfig curriculum;  // margin_div resolved at run time
  double margin_scale = 1.4;
  attacks::AttackConfig attack;
  GeometryConfig geometry;
  EvalConfig eval;
  SweepConfig sweep;

  // Propagates the seed and shared sizes into the module configs and
  // validates them.
  void Resolve();
};

// "default" (or an empty path) yields the built-in defaults.
RunConfig LoadConfig(const std::string& path);
RunConfig ParseConfig(const std::string& ini_text);
// Every key with its resolved value, in schema order.
std::string ResolvedConfigText(const RunConfig& c);

struct ConfigKey {
  std::string name;  // section.key
  std::string doc;
};
std::vector<ConfigKey> ConfigSchema();

}  // namespace osnip::cli

#endif  // OSNIP_CLI_CONFIG_H_
