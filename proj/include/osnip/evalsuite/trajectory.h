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

// Layer-wise similarity between clean and perturbed runs, and the
// magnitude-matched random-noise control.

#ifndef OSNIP_EVALSUITE_TRAJECTORY_H_
#define OSNIP_EVALSUITE_TRAJECTORY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "osnip/diffmath/rng.h"
#include "osnip/encryptor/encryptor.h"
#include "osnip/toylm/predictor.h"

namespace osnip::evalsuite {

struct TrajectoryReport {
  int64_t prompt_len = 0;
  // cos[l][t]: layer l, position t; positions >= prompt_len are generated.
  std::vector<std::vector<double>> cos;
  std::vector<int64_t> clean_tokens;      // greedy continuation, clean run
  std::vector<int64_t> perturbed_tokens;  // greedy continuation, perturbed run

  double PromptMean(size_t layer) const;
  double GenerationMean(size_t layer) const;
  double Mean(size_t layer) const;
};

// Argmax continuation of `generate_n` tokens; generated tokens enter as clean
// embeddings.
std::vector<int64_t> GreedyDecode(const toylm::PredictorModel& predictor, const Tensor& prompt,
                                  int64_t generate_n);

// Only the prompt is perturbed. Each run decodes its own continuation and
// states are compared position by position.
TrajectoryReport LayerTrajectory(const toylm::PredictorModel& predictor, const Tensor& clean_prompt,
                                 const Tensor& perturbed_prompt, int64_t generate_n = 16);

// Columns: prompt, layer, position, phase, cos.
std::string TrajectoryCsv(const std::vector<TrajectoryReport>& reports);

struct NoiseControlResult {
  double encryptor_kl_mean = 0.0;
  double noise_kl_mean = 0.0;
  double kl_ratio = 0.0;
  // Fraction of prompts whose final-block mean similarity is higher for the
  // encryptor than for the noise control.
  double final_block_win_rate = 0.0;
  std::vector<double> encryptor_final;
  std::vector<double> noise_final;
  int64_t n_tokens = 0;
};

// For every prompt i: z_enc = Encrypt(h_i, keys[i]); the control draws a
// random delta with the norm of the encryptor's pre-projection delta for
// that token and applies the same projection.
NoiseControlResult NoiseControl(const toylm::PredictorModel& predictor,
                                const encryptor::EncryptorModel& enc,
                                const std::vector<std::vector<int64_t>>& prompts,
                                const std::vector<encryptor::SecretKey>& keys, const Rng& rng,
                                int64_t generate_n = 16);

}  // namespace osnip::evalsuite

#endif  // OSNIP_EVALSUITE_TRAJECTORY_H_
