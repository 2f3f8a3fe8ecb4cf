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

#include "osnip/evalsuite/utility.h"

#include <algorithm>
#include <cmath>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"
#include "osnip/evalsuite/stats.h"

namespace osnip::evalsuite {

encryptor::SecretKey InstanceKey(const Rng& rng, size_t i, size_t j) {
  Rng r = rng.Split(i).Split(j);
  return encryptor::SecretKey::Random(r);
}

std::vector<double> TokenKl(const toylm::PredictorModel& predictor, const std::vector<Tensor>& clean,
                            const std::vector<Tensor>& perturbed) {
  if (clean.size() != perturbed.size()) throw ShapeError("TokenKl needs paired sequences");
  std::vector<Tensor> per(clean.size());
  ParallelFor(static_cast<int64_t>(clean.size()), [&](int64_t i) {
    const Tensor p = toylm::Predict(predictor, clean[i]).distribution;
    const Tensor q = toylm::Predict(predictor, perturbed[i]).distribution;
    per[i] = ops::KlRows(p, q);
  });
  std::vector<double> out;
  for (const Tensor& t : per) out.insert(out.end(), t.vec().begin(), t.vec().end());
  return out;
}

UtilityReport UtilityEval(const toylm::PredictorModel& predictor, const encryptor::EncryptorModel* enc,
                          const toylm::ToyCorpus& corpus, const Rng& rng, double band_limit) {
  if (corpus.size() == 0) throw ConfigError("utility evaluation on an empty corpus");
  const size_t n = corpus.size();
  std::vector<Tensor> clean(n), pert(n);
  ParallelFor(static_cast<int64_t>(n), [&](int64_t i) {
    clean[i] = toylm::Embed(predictor, corpus.sequences[i]);
    pert[i] = enc ? encryptor::Encrypt(*enc, clean[i], InstanceKey(rng, i)) : clean[i];
  });
  const toylm::EmbeddingTransform transform = [&](const Tensor&, size_t i) { return pert[i]; };

  UtilityReport r;
  r.band_limit = band_limit;
  r.clean_accuracy = toylm::ClassificationAccuracy(predictor, corpus);
  r.encrypted_accuracy = toylm::ClassificationAccuracy(predictor, corpus, transform);
  r.retained_performance = r.clean_accuracy > 0.0 ? r.encrypted_accuracy / r.clean_accuracy : 0.0;
  r.clean_ppl = toylm::Perplexity(predictor, corpus);
  r.encrypted_ppl = toylm::Perplexity(predictor, corpus, transform);
  r.ppl_ratio = r.encrypted_ppl / r.clean_ppl;

  const std::vector<double> kl = TokenKl(predictor, clean, pert);
  r.kl_mean = Mean(kl);
  r.kl_median = Median(kl);
  std::vector<double> cosines;
  for (size_t i = 0; i < n; ++i) {
    const Tensor dots = ops::RowDot(clean[i], pert[i]);
    const Tensor nh = ops::RowNorms(clean[i]), nz = ops::RowNorms(pert[i]);
    for (int64_t t = 0; t < dots.size(); ++t) cosines.push_back(std::fabs(dots[t] / (nh[t] * nz[t])));
  }
  r.n_tokens = static_cast<int64_t>(cosines.size());
  r.cos_abs_mean = Mean(cosines);
  int64_t inside = 0;
  for (double c : cosines) inside += c <= band_limit;
  r.cos_band_fraction = static_cast<double>(inside) / static_cast<double>(r.n_tokens);
  return r;
}

Tensor InstanceSet::StackedPerturbed() const {
  if (perturbed.empty()) throw ConfigError("empty instance set");
  const int64_t d = perturbed.front().cols();
  int64_t rows = 0;
  for (const Tensor& z : perturbed) rows += z.rows();
  Tensor out({rows, d});
  int64_t at = 0;
  for (const Tensor& z : perturbed) {
    std::copy(z.vec().begin(), z.vec().end(), out.data() + at * d);
    at += z.rows();
  }
  return out;
}

std::vector<int64_t> InstanceSet::StackedIds() const {
  std::vector<int64_t> out;
  for (const auto& s : ids) out.insert(out.end(), s.begin(), s.end());
  return out;
}

InstanceSet BuildInstances(const toylm::PredictorModel& predictor, const encryptor::EncryptorModel* enc,
                           const toylm::ToyCorpus& corpus, int64_t n_sequences, int64_t replicas,
                           const Rng& rng) {
  if (n_sequences < 1 || replicas < 1) throw ConfigError("instance counts must be >= 1");
  const int64_t n = std::min<int64_t>(n_sequences, static_cast<int64_t>(corpus.size()));
  InstanceSet s;
  const int64_t total = n * replicas;
  s.clean.resize(total);
  s.perturbed.resize(total);
  s.ids.resize(total);
  s.keys.resize(total);
  s.source.resize(total);
  ParallelFor(total, [&](int64_t k) {
    const int64_t i = k / replicas, j = k % replicas;
    s.ids[k] = corpus.sequences[i];
    s.source[k] = i;
    s.keys[k] = InstanceKey(rng, i, j);
    s.clean[k] = toylm::Embed(predictor, s.ids[k]);
    s.perturbed[k] = enc ? encryptor::Encrypt(*enc, s.clean[k], s.keys[k]) : s.clean[k];
  });
  return s;
}

}  // namespace osnip::evalsuite
