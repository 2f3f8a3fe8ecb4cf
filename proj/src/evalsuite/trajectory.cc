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

#include "osnip/evalsuite/trajectory.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "osnip/attacks/adaptive.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"
#include "osnip/evalsuite/stats.h"
#include "osnip/evalsuite/utility.h"

namespace osnip::evalsuite {
namespace {

Tensor AppendRow(const Tensor& x, const Tensor& row) {
  Tensor out({x.rows() + 1, x.cols()});
  std::copy(x.vec().begin(), x.vec().end(), out.data());
  std::copy(row.vec().begin(), row.vec().end(), out.data() + x.size());
  return out;
}

Tensor Continue(const toylm::PredictorModel& m, Tensor seq, const std::vector<int64_t>& tokens) {
  for (int64_t t : tokens) seq = AppendRow(seq, m.Embeddings().Row(t));
  return seq;
}

double RowCos(const Tensor& a, const Tensor& b, int64_t t) {
  const int64_t w = a.cols();
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int64_t j = 0; j < w; ++j) {
    const double x = a.at(t, j), y = b.at(t, j);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) return na == nb ? 1.0 : 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double RangeMean(const std::vector<double>& v, size_t begin, size_t end) {
  if (begin >= end) throw ConfigError("empty trajectory phase");
  double s = 0.0;
  for (size_t i = begin; i < end; ++i) s += v[i];
  return s / static_cast<double>(end - begin);
}

}  // namespace

double TrajectoryReport::PromptMean(size_t layer) const {
  return RangeMean(cos.at(layer), 0, prompt_len);
}

double TrajectoryReport::GenerationMean(size_t layer) const {
  return RangeMean(cos.at(layer), prompt_len, cos.at(layer).size());
}

double TrajectoryReport::Mean(size_t layer) const {
  return RangeMean(cos.at(layer), 0, cos.at(layer).size());
}

std::vector<int64_t> GreedyDecode(const toylm::PredictorModel& predictor, const Tensor& prompt,
                                  int64_t generate_n) {
  if (generate_n < 0) throw ConfigError("generate_n must be >= 0");
  std::vector<int64_t> out;
  Tensor seq = prompt;
  for (int64_t g = 0; g < generate_n; ++g) {
    const Tensor dist = toylm::Predict(predictor, seq).distribution;
    const double* last = dist.data() + (dist.rows() - 1) * dist.cols();
    const int64_t next = std::max_element(last, last + dist.cols()) - last;
    out.push_back(next);
    seq = AppendRow(seq, predictor.Embeddings().Row(next));
  }
  return out;
}

TrajectoryReport LayerTrajectory(const toylm::PredictorModel& predictor, const Tensor& clean_prompt,
                                 const Tensor& perturbed_prompt, int64_t generate_n) {
  if (clean_prompt.shape() != perturbed_prompt.shape() || clean_prompt.rank() != 2) {
    throw ShapeError("trajectory prompts must share one [T, d] shape");
  }
  TrajectoryReport r;
  r.prompt_len = clean_prompt.rows();
  r.clean_tokens = GreedyDecode(predictor, clean_prompt, generate_n);
  r.perturbed_tokens = GreedyDecode(predictor, perturbed_prompt, generate_n);
  const auto a = toylm::Predict(predictor, Continue(predictor, clean_prompt, r.clean_tokens)).hidden_states;
  const auto b =
      toylm::Predict(predictor, Continue(predictor, perturbed_prompt, r.perturbed_tokens)).hidden_states;
  for (size_t l = 0; l < a.size(); ++l) {
    std::vector<double> c;
    for (int64_t t = 0; t < a[l].rows(); ++t) c.push_back(RowCos(a[l], b[l], t));
    r.cos.push_back(std::move(c));
  }
  return r;
}

std::string TrajectoryCsv(const std::vector<TrajectoryReport>& reports) {
  std::ostringstream os;
  os << "prompt,layer,position,phase,cos\n";
  for (size_t p = 0; p < reports.size(); ++p) {
    const TrajectoryReport& r = reports[p];
    for (size_t l = 0; l < r.cos.size(); ++l) {
      for (size_t t = 0; t < r.cos[l].size(); ++t) {
        os << p << ',' << l << ',' << t << ','
           << (static_cast<int64_t>(t) < r.prompt_len ? "prompt" : "generation") << ','
           << FormatDouble(r.cos[l][t]) << '\n';
      }
    }
  }
  return os.str();
}

NoiseControlResult NoiseControl(const toylm::PredictorModel& predictor,
                                const encryptor::EncryptorModel& enc,
                                const std::vector<std::vector<int64_t>>& prompts,
                                const std::vector<encryptor::SecretKey>& keys, const Rng& rng,
                                int64_t generate_n) {
  if (prompts.empty() || prompts.size() != keys.size()) {
    throw ConfigError("noise control needs one key per prompt");
  }
  const int64_t n = static_cast<int64_t>(prompts.size());
  std::vector<Tensor> clean(n), zenc(n), znoise(n);
  NoiseControlResult res;
  res.encryptor_final.resize(n);
  res.noise_final.resize(n);
  ParallelFor(n, [&](int64_t i) {
    clean[i] = toylm::Embed(predictor, prompts[i]);
    zenc[i] = encryptor::Encrypt(enc, clean[i], keys[i]);
    const Tensor norms = ops::RowNorms(encryptor::Perturbation(enc, clean[i], keys[i]));
    Rng r = rng.Split(static_cast<uint64_t>(i));
    znoise[i] = attacks::RandomNoiseControl(clean[i], norms.vec(), r);
    const size_t last = static_cast<size_t>(predictor.config.layers);
    res.encryptor_final[i] = LayerTrajectory(predictor, clean[i], zenc[i], generate_n).Mean(last);
    res.noise_final[i] = LayerTrajectory(predictor, clean[i], znoise[i], generate_n).Mean(last);
  });
  const std::vector<double> kl_enc = TokenKl(predictor, clean, zenc);
  const std::vector<double> kl_noise = TokenKl(predictor, clean, znoise);
  res.n_tokens = static_cast<int64_t>(kl_enc.size());
  res.encryptor_kl_mean = evalsuite::Mean(kl_enc);
  res.noise_kl_mean = evalsuite::Mean(kl_noise);
  res.kl_ratio = res.encryptor_kl_mean > 0.0 ? res.noise_kl_mean / res.encryptor_kl_mean : INFINITY;
  int64_t wins = 0;
  for (int64_t i = 0; i < n; ++i) wins += res.encryptor_final[i] > res.noise_final[i];
  res.final_block_win_rate = static_cast<double>(wins) / static_cast<double>(n);
  return res;
}

}  // namespace osnip::evalsuite
