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

#include "osnip/evalsuite/sweeps.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "osnip/attacks/knn.h"
#include "osnip/attacks/vocab.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"
#include "osnip/evalsuite/stats.h"
#include "osnip/evalsuite/utility.h"
#include "osnip/geometry/sphere.h"

namespace osnip::evalsuite {
namespace {

constexpr uint64_t kEvalStream = 32;
constexpr uint64_t kEncInitStream = 20;

attacks::AttackConfig Top10() {
  attacks::AttackConfig c;
  c.top_k = {10};
  return c;
}

}  // namespace

Tensor CosineLevelPerturb(const Tensor& h, double level, Rng& rng) {
  if (!(level >= 0.0 && level <= 1.0)) throw ConfigError("cosine level must be in [0, 1]");
  const Tensor hm = h.rank() == 1 ? h.Reshaped({1, h.size()}) : h;
  const int64_t d = hm.cols();
  if (d < 2) throw ConfigError("cosine targeting needs d >= 2");
  Tensor out(hm.shape());
  const double s = std::sqrt(1.0 - level * level);
  std::vector<double> u(d);
  for (int64_t i = 0; i < hm.rows(); ++i) {
    const double* hr = hm.data() + i * d;
    double r2 = 0.0;
    for (int64_t j = 0; j < d; ++j) r2 += hr[j] * hr[j];
    const double r = std::sqrt(r2);
    if (!(r > 0.0)) throw NumericError("cosine targeting of a zero embedding");
    double un;
    do {
      rng.FillNormal(u.data(), d);
      double dot = 0.0;
      for (int64_t j = 0; j < d; ++j) dot += u[j] * hr[j];
      // Two Gram-Schmidt passes keep the residual overlap at rounding level.
      for (int pass = 0; pass < 2; ++pass) {
        for (int64_t j = 0; j < d; ++j) u[j] -= dot / r2 * hr[j];
        dot = 0.0;
        for (int64_t j = 0; j < d; ++j) dot += u[j] * hr[j];
      }
      un = 0.0;
      for (double v : u) un += v * v;
      un = std::sqrt(un);
    } while (!(un > 1e-6));
    double* z = out.data() + i * d;
    for (int64_t j = 0; j < d; ++j) z[j] = level * hr[j] + s * r * u[j] / un;
  }
  return out.Reshaped(h.shape());
}

CosineSweep CosineAsrSweep(const toylm::PredictorModel& predictor, const toylm::ToyCorpus& corpus,
                           const std::vector<double>& levels, const std::vector<int64_t>& stop_words,
                           int64_t n_sequences, int64_t vocab_sequences,
                           const attacks::AttackConfig& attack, const Rng& rng) {
  if (levels.size() < 2) throw ConfigError("cosine sweep needs at least two levels");
  const int64_t n = std::min<int64_t>(n_sequences, static_cast<int64_t>(corpus.size()));
  const int64_t nv = std::min<int64_t>(vocab_sequences, n);
  if (n < 1) throw ConfigError("cosine sweep needs sequences");
  const Tensor& table = predictor.Embeddings();
  CosineSweep out;
  for (size_t li = 0; li < levels.size(); ++li) {
    const double level = levels[li];
    std::vector<Tensor> z(n);
    std::vector<double> err(n, 0.0);
    ParallelFor(n, [&](int64_t i) {
      Rng r = rng.Split(li).Split(i);
      const Tensor h = toylm::Embed(predictor, corpus.sequences[i]);
      z[i] = CosineLevelPerturb(h, level, r);
      const Tensor dots = ops::RowDot(h, z[i]);
      const Tensor nh = ops::RowNorms(h), nz = ops::RowNorms(z[i]);
      for (int64_t t = 0; t < h.rows(); ++t) {
        err[i] = std::max(err[i], std::fabs(std::fabs(dots[t] / (nh[t] * nz[t])) - level));
      }
    });
    std::vector<int64_t> ids;
    int64_t rows = 0;
    for (int64_t i = 0; i < n; ++i) rows += z[i].rows();
    Tensor stacked({rows, table.cols()});
    int64_t at = 0;
    for (int64_t i = 0; i < n; ++i) {
      std::copy(z[i].vec().begin(), z[i].vec().end(), stacked.data() + at * table.cols());
      at += z[i].rows();
      ids.insert(ids.end(), corpus.sequences[i].begin(), corpus.sequences[i].end());
    }
    SweepPoint p;
    p.control = level;
    p.asr_knn_top10 = attacks::KnnAttack(table, stacked, ids, Top10()).At(10);
    const std::vector<Tensor> vz(z.begin(), z.begin() + nv);
    const std::vector<std::vector<int64_t>> vid(corpus.sequences.begin(), corpus.sequences.begin() + nv);
    const attacks::AttackReport v = attacks::VocabMatchingAttack(predictor, vz, vid, stop_words, attack);
    p.asr_vocab_total = v.total_asr;
    p.asr_vocab_clean = v.clean_asr;
    p.cos_error = *std::max_element(err.begin(), err.end());
    out.points.push_back(p);
  }
  std::vector<double> lv, knn, voc;
  for (const SweepPoint& p : out.points) {
    lv.push_back(p.control);
    knn.push_back(p.asr_knn_top10);
    voc.push_back(p.asr_vocab_clean);
  }
  out.spearman_knn = Spearman(lv, knn);
  out.spearman_vocab = Spearman(lv, voc);
  return out;
}

SweepPoint EvaluateTrained(const toylm::PredictorModel& predictor, const toylm::CorpusSplit& split,
                           const std::vector<int64_t>& stop_words, const ExperimentConfig& cfg) {
  encryptor::EncryptorConfig ec = cfg.encryptor;
  ec.dim = predictor.config.embed_dim;
  Rng init = Rng(cfg.seed).Split(kEncInitStream);
  const encryptor::EncryptorModel enc0 = encryptor::InitEncryptor(ec, init);
  objectives::CurriculumConfig cc = cfg.curriculum;
  cc.margin_div = trainer::DiversityMargin(predictor.Embeddings(), cfg.margin_scale);
  const trainer::TrainResult tr = trainer::TrainEncryptor(predictor, enc0, split.train, cfg.train, cc);

  const Rng eval = Rng(cfg.seed).Split(kEvalStream);
  const InstanceSet inst = BuildInstances(predictor, &tr.model, split.test, cfg.eval_sequences,
                                          cfg.eval_replicas, eval);
  SweepPoint p;
  p.asr_knn_top10 =
      attacks::KnnAttack(predictor.Embeddings(), inst.StackedPerturbed(), inst.StackedIds(), Top10()).At(10);
  attacks::AttackConfig vc;
  vc.layer = cfg.vocab_layer;
  const int64_t nv = std::min<int64_t>(cfg.vocab_sequences, static_cast<int64_t>(split.test.size()));
  const InstanceSet vinst = BuildInstances(predictor, &tr.model, split.test, nv, 1, eval);
  const attacks::AttackReport v =
      attacks::VocabMatchingAttack(predictor, vinst.perturbed, vinst.ids, stop_words, vc);
  p.asr_vocab_total = v.total_asr;
  p.asr_vocab_clean = v.clean_asr;
  const UtilityReport u = UtilityEval(predictor, &tr.model, split.test, eval, cc.eps_margin + 0.05);
  p.retained_performance = u.retained_performance;
  p.ppl_ratio = u.ppl_ratio;
  p.bound = predictor.config.embed_dim >= 3 && cc.eps_margin > 0.0
                ? geometry::BandComplementBound(predictor.config.embed_dim, cc.eps_margin)
                : 2.0;
  return p;
}

std::vector<SweepPoint> DimensionalitySweep(const std::vector<int64_t>& d_grid,
                                            const toylm::CorpusSplit& split,
                                            const std::vector<int64_t>& stop_words,
                                            const ExperimentConfig& cfg) {
  std::vector<SweepPoint> out;
  for (int64_t d : d_grid) {
    ExperimentConfig c = cfg;
    c.predictor.embed_dim = d;
    c.encryptor.dim = d;
    c.encryptor.key_dim = std::max<int64_t>(1, d / 4);
    const toylm::PredictorModel pred = toylm::TrainPredictor(split.train, c.predictor, c.predictor_train).model;
    SweepPoint p = EvaluateTrained(pred, split, stop_words, c);
    p.control = static_cast<double>(d);
    out.push_back(p);
  }
  MarkFrontier(out);
  return out;
}

std::vector<SweepPoint> ParetoGrid(const toylm::PredictorModel& predictor,
                                   const toylm::CorpusSplit& split,
                                   const std::vector<int64_t>& stop_words,
                                   const std::vector<double>& lambda1_grid,
                                   const std::vector<double>& eps_grid, const ExperimentConfig& cfg) {
  std::vector<SweepPoint> out;
  for (double l1 : lambda1_grid) {
    for (double eps : eps_grid) {
      ExperimentConfig c = cfg;
      c.curriculum.lambda1_base = l1;
      c.curriculum.eps_margin = eps;
      SweepPoint p = EvaluateTrained(predictor, split, stop_words, c);
      p.control = l1;
      p.control2 = eps;
      out.push_back(p);
    }
  }
  MarkFrontier(out);
  return out;
}

void MarkFrontier(std::vector<SweepPoint>& points) {
  std::vector<double> asr, rp;
  for (const SweepPoint& p : points) {
    asr.push_back(p.asr_knn_top10);
    rp.push_back(p.retained_performance);
  }
  const std::vector<bool> f = ParetoFrontier(asr, rp);
  for (size_t i = 0; i < points.size(); ++i) points[i].frontier = f[i];
}

std::string SweepCsv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "control,control2,asr_knn_top10,asr_vocab_total,asr_vocab_clean,retained_performance,"
        "ppl_ratio,bound,cos_error,frontier\n";
  for (const SweepPoint& p : points) {
    os << FormatDouble(p.control) << ',' << FormatDouble(p.control2) << ','
       << FormatDouble(p.asr_knn_top10) << ',' << FormatDouble(p.asr_vocab_total) << ','
       << FormatDouble(p.asr_vocab_clean) << ',' << FormatDouble(p.retained_performance) << ','
       << FormatDouble(p.ppl_ratio) << ',' << FormatDouble(p.bound) << ','
       << FormatDouble(p.cos_error) << ',' << (p.frontier ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace osnip::evalsuite
