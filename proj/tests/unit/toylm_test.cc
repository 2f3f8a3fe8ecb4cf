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

#include <algorithm>
#include <cmath>
#include <set>

#include "osnip/diffmath/container.h"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/toylm/corpus.h"
#include "osnip/toylm/predictor.h"
#include "osnip/toylm/train.h"

namespace osnip::toylm {
namespace {

PredictorModel SmallPredictor(uint64_t seed = 3) {
  Rng rng(seed);
  PredictorModel m = InitPredictor(PredictorConfig{}, rng);
  m.Freeze();
  return m;
}

TEST(CorpusTest, SameSeedSameCorpus) {
  const CorpusSpec spec;
  const ToyCorpus a = GenerateCorpus(spec, 50);
  const ToyCorpus b = GenerateCorpus(spec, 50);
  EXPECT_EQ(a.sequences, b.sequences);
  EXPECT_EQ(a.labels, b.labels);
  CorpusSpec other = spec;
  other.seed = 7;
  EXPECT_NE(GenerateCorpus(other, 50).sequences, a.sequences);
}

TEST(CorpusTest, LengthsAndIdsInRange) {
  const CorpusSpec spec;
  const ToyCorpus c = GenerateCorpus(spec, 1000);
  ASSERT_EQ(c.size(), 1000u);
  for (size_t i = 0; i < c.size(); ++i) {
    const auto& s = c.sequences[i];
    EXPECT_GE(static_cast<int64_t>(s.size()), spec.min_len);
    EXPECT_LE(static_cast<int64_t>(s.size()), spec.max_len);
    for (int64_t t : s) {
      ASSERT_GE(t, 0);
      ASSERT_LT(t, spec.vocab_size);
    }
    EXPECT_EQ(c.labels[i], LabelOf(spec, s));
  }
}

TEST(CorpusTest, UnigramMatchesStationaryLaw) {
  const CorpusSpec spec;
  const ToyCorpus c = GenerateCorpus(spec, 10000);
  std::vector<double> counts(spec.vocab_size, 0.0);
  double total = 0.0;
  for (const auto& s : c.sequences) {
    for (int64_t t : s) counts[t] += 1.0;
    total += static_cast<double>(s.size());
  }
  const std::vector<double> pi = StationaryUnigram(spec);
  double tv = 0.0, mass = 0.0;
  for (int64_t t = 0; t < spec.vocab_size; ++t) {
    tv += std::fabs(counts[t] / total - pi[t]);
    mass += pi[t];
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_LE(0.5 * tv, 0.05);
}

TEST(CorpusTest, ChainsAreRowStochastic) {
  const CorpusSpec spec;
  const ChainTables ch = BuildChains(spec);
  ASSERT_EQ(static_cast<int64_t>(ch.a.size()), spec.num_topics);
  for (const Tensor& t : ch.a) {
    const Tensor rs = ops::RowSums(t);
    for (double v : rs.vec()) EXPECT_NEAR(v, 1.0, 1e-12);
  }
  for (const Tensor& p : ch.pairs) EXPECT_NEAR(ops::Sum(p), 1.0, 1e-12);
}

TEST(CorpusTest, StopWordsAreTheMostProbableTokens) {
  const CorpusSpec spec;
  const std::vector<int64_t> stop = StopWords(spec);
  ASSERT_EQ(static_cast<int64_t>(stop.size()), spec.num_stop_words);
  EXPECT_TRUE(std::is_sorted(stop.begin(), stop.end()));
  const std::vector<double> pi = StationaryUnigram(spec);
  double min_stop = 1.0;
  for (int64_t s : stop) min_stop = std::min(min_stop, pi[s]);
  const std::set<int64_t> in(stop.begin(), stop.end());
  for (int64_t t = 0; t < spec.vocab_size; ++t) {
    if (!in.count(t)) {
      EXPECT_LE(pi[t], min_stop);
    }
  }
}

TEST(CorpusTest, JsonlRoundTripAndSplit) {
  const CorpusSpec spec;
  const ToyCorpus c = GenerateCorpus(spec, 40);
  const ToyCorpus back = CorpusFromJsonl(CorpusToJsonl(c), spec);
  EXPECT_EQ(back.sequences, c.sequences);
  EXPECT_EQ(back.labels, c.labels);
  const CorpusSplit sp = SplitCorpus(c);
  EXPECT_EQ(sp.train.size(), 32u);
  EXPECT_EQ(sp.val.size(), 4u);
  EXPECT_EQ(sp.test.size(), 4u);
  EXPECT_EQ(sp.test.sequences.back(), c.sequences.back());
}

TEST(CorpusTest, RejectsBadSpecAndBadJsonl) {
  CorpusSpec spec;
  spec.vocab_size = 4;
  EXPECT_THROW(spec.Validate(), ConfigError);
  EXPECT_ANY_THROW(CorpusFromJsonl("{\"tokens\":[999],\"label\":0}\n", CorpusSpec{}));
}

TEST(PredictorTest, EmbedIsRowLookup) {
  const PredictorModel m = SmallPredictor();
  const Tensor e = Embed(m, {5, 9, 5});
  ASSERT_EQ(e.shape(), (Shape{3, 64}));
  EXPECT_EQ(e.Row(0), m.Embeddings().Row(5));
  EXPECT_EQ(e.Row(1), m.Embeddings().Row(9));
  EXPECT_EQ(e.Row(0), e.Row(2));
}

TEST(PredictorTest, PredictIsDeterministicAndNormalized) {
  const PredictorModel m = SmallPredictor();
  const Tensor h = Embed(m, {1, 2, 3, 4, 5});
  const PredictorOutput a = Predict(m, h);
  const PredictorOutput b = Predict(m, h);
  EXPECT_EQ(a.distribution, b.distribution);
  ASSERT_EQ(a.hidden_states.size(), static_cast<size_t>(m.config.layers + 1));
  EXPECT_EQ(a.hidden_states[0], h);
  const Tensor rs = ops::RowSums(a.distribution);
  for (double v : rs.vec()) EXPECT_NEAR(v, 1.0, 1e-12);
  const Tensor kl = ops::KlRows(a.distribution, b.distribution);
  for (double v : kl.vec()) EXPECT_EQ(v, 0.0);
}

TEST(PredictorTest, PrefixIsCausal) {
  const PredictorModel m = SmallPredictor();
  const PredictorOutput full = Predict(m, Embed(m, {7, 8, 9, 10}));
  const PredictorOutput pre = Predict(m, Embed(m, {7, 8}));
  for (int64_t j = 0; j < 256; ++j) EXPECT_DOUBLE_EQ(full.distribution.at(1, j), pre.distribution.at(1, j));
}

TEST(PredictorTest, UniformLogitsGiveVocabPerplexity) {
  Rng rng(3);
  PredictorModel m = InitPredictor(PredictorConfig{}, rng);
  m.params.Set("U", Tensor({256, m.config.model_dim}));
  m.Freeze();
  const ToyCorpus c = GenerateCorpus(CorpusSpec{}, 20);
  EXPECT_NEAR(Perplexity(m, c), 256.0, 1e-9);
}

TEST(PredictorTest, IdentityTransformKeepsPerplexity) {
  const PredictorModel m = SmallPredictor();
  const ToyCorpus c = GenerateCorpus(CorpusSpec{}, 20);
  const double clean = Perplexity(m, c);
  EXPECT_EQ(Perplexity(m, c, [](const Tensor& e, size_t) { return e; }), clean);
  EXPECT_EQ(ClassificationAccuracy(m, c, [](const Tensor& e, size_t) { return e; }),
            ClassificationAccuracy(m, c));
}

TEST(PredictorTest, PackUnpackRoundTrip) {
  const PredictorModel m = SmallPredictor();
  Container c;
  PackPredictor(m, c);
  const PredictorModel back = UnpackPredictor(ParseContainer(SerializeContainer(c)));
  EXPECT_TRUE(back.frozen);
  EXPECT_EQ(ParamHash(back.params), ParamHash(m.params));
  c.tensors.pop_back();
  EXPECT_THROW(UnpackPredictor(c), CorruptHeaderError);
}

TEST(PredictorTest, RejectsWrongInputWidth) {
  const PredictorModel m = SmallPredictor();
  EXPECT_THROW(Predict(m, Tensor({3, 10})), ShapeError);
}

TEST(TrainPredictorTest, LearnsTheCorpusAndFreezes) {
  const CorpusSplit sp = SplitCorpus(GenerateCorpus(CorpusSpec{}, 1000));
  PredictorTrainConfig tc;
  tc.steps = 600;
  const PredictorTrainResult r = TrainPredictor(sp.train, PredictorConfig{}, tc);
  EXPECT_TRUE(r.model.frozen);
  for (const std::string& n : r.model.params.Names()) EXPECT_FALSE(r.model.params.Trainable(n));
  EXPECT_EQ(static_cast<int64_t>(r.losses.size()), tc.steps);
  EXPECT_LT(Perplexity(r.model, sp.val), 0.5 * 256.0);
  EXPECT_LT(r.losses.back(), r.losses.front());
  const PredictorTrainResult again = TrainPredictor(sp.train, PredictorConfig{}, tc);
  EXPECT_EQ(ParamHash(again.model.params), ParamHash(r.model.params));
}

}  // namespace
}  // namespace osnip::toylm
