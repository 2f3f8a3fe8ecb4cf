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

#ifndef OSNIP_EVALSUITE_SWEEPS_H_
#define OSNIP_EVALSUITE_SWEEPS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "osnip/attacks/report.h"
#include "osnip/diffmath/rng.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/objectives/curriculum.h"
#include "osnip/toylm/corpus.h"
#include "osnip/toylm/predictor.h"
#include "osnip/toylm/train.h"
#include "osnip/trainer/trainer.h"

namespace osnip::evalsuite {

// Row of h * (level h_hat + sqrt(1 - level^2) u_perp): |cos(h, z)| = level,
// ||z|| = ||h||, with u_perp a random unit direction orthogonal to h.
Tensor CosineLevelPerturb(const Tensor& h, double level, Rng& rng);

struct SweepPoint {
  double control = 0.0;   // |cos| level, dimension d, or lambda1
  double control2 = 0.0;  // eps for the (lambda1, eps) grid
  double asr_knn_top10 = 0.0;
  double asr_vocab_total = 0.0;
  double asr_vocab_clean = 0.0;
  double retained_performance = 1.0;
  double ppl_ratio = 1.0;
  double bound = 0.0;
  double cos_error = 0.0;  // largest | |cos| - level | in a cosine sweep
  bool frontier = false;
};

struct CosineSweep {
  std::vector<SweepPoint> points;
  double spearman_knn = 0.0;
  double spearman_vocab = 0.0;
};

// Test-split sequences [0, n_sequences) perturbed at every level. The
// vocabulary attack runs at `attack.layer` over the first `vocab_sequences`.
CosineSweep CosineAsrSweep(const toylm::PredictorModel& predictor, const toylm::ToyCorpus& corpus,
                           const std::vector<double>& levels, const std::vector<int64_t>& stop_words,
                           int64_t n_sequences, int64_t vocab_sequences,
                           const attacks::AttackConfig& attack, const Rng& rng);

struct ExperimentConfig {
  toylm::PredictorConfig predictor;
  toylm::PredictorTrainConfig predictor_train;
  encryptor::EncryptorConfig encryptor;
  trainer::TrainConfig train;
  objectives::CurriculumConfig curriculum;
  double margin_scale = 1.4;
  int64_t eval_sequences = 200;
  int64_t eval_replicas = 5;
  int64_t vocab_sequences = 60;
  int64_t vocab_layer = 1;
  uint64_t seed = 42;
};

// Trains an encryptor for `predictor` and measures privacy and utility on
// the test split. The curriculum's margin is replaced by margin_scale times
// the median embedding norm.
SweepPoint EvaluateTrained(const toylm::PredictorModel& predictor, const toylm::CorpusSplit& split,
                           const std::vector<int64_t>& stop_words, const ExperimentConfig& cfg);

// Each d trains its own predictor and encryptor under the same budget.
std::vector<SweepPoint> DimensionalitySweep(const std::vector<int64_t>& d_grid,
                                            const toylm::CorpusSplit& split,
                                            const std::vector<int64_t>& stop_words,
                                            const ExperimentConfig& cfg);

// (lambda1, eps) grid on one predictor; marks the strict-dominance frontier.
std::vector<SweepPoint> ParetoGrid(const toylm::PredictorModel& predictor,
                                   const toylm::CorpusSplit& split,
                                   const std::vector<int64_t>& stop_words,
                                   const std::vector<double>& lambda1_grid,
                                   const std::vector<double>& eps_grid, const ExperimentConfig& cfg);

void MarkFrontier(std::vector<SweepPoint>& points);

// Columns: control, control2, asr_knn_top10, asr_vocab_total, asr_vocab_clean,
// retained_performance, ppl_ratio, bound, cos_error, frontier.
std::string SweepCsv(const std::vector<SweepPoint>& points);

}  // namespace osnip::evalsuite

#endif  // OSNIP_EVALSUITE_SWEEPS_H_
