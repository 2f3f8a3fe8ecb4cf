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

// Synthetic topic corpus. Tokens group into concepts: each function concept
// is a single token, each content concept owns `synonyms` interchangeable
// tokens. Concept sequences follow a per-class order-2 mixture-transition
// chain
//   T_c(x | a, b) = beta * A_c(x | b) + (1 - beta) * B_c(x | a),
// started from its stationary pair law; each content concept then emits one
// of its synonyms uniformly.

#ifndef OSNIP_TOYLM_CORPUS_H_
#define OSNIP_TOYLM_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "osnip/diffmath/rng.h"
#include "osnip/diffmath/tensor.h"

namespace osnip::toylm {

struct CorpusSpec {
  int64_t vocab_size = 256;
  int64_t num_function = 16;
  int64_t synonyms = 4;
  int64_t num_topics = 4;
  int64_t min_len = 20;
  int64_t max_len = 64;
  double beta = 0.7;
  double function_weight = 4.0;
  double own_topic_boost = 6.0;
  double other_topic_boost = 0.15;
  double log_weight_sigma = 1.5;
  int64_t num_stop_words = 10;
  uint64_t seed = 42;

  int64_t NumConcepts() const;
  int64_t ConceptOf(int64_t token) const;
  // -1 for function concepts.
  int64_t TopicOfConcept(int64_t concept_id) const;
  int64_t TopicOfToken(int64_t token) const { return TopicOfConcept(ConceptOf(token)); }
  // Throws ConfigError on inconsistent values.
  void Validate() const;
};

// Per-class concept-level transition tables, row-stochastic NC x NC.
struct ChainTables {
  std::vector<Tensor> a;      // a[c](b, x)
  std::vector<Tensor> b;      // b[c](a, x)
  std::vector<Tensor> pairs;  // stationary pair law pi_c(a, b)
};

ChainTables BuildChains(const CorpusSpec& spec);

struct ToyCorpus {
  CorpusSpec spec;
  std::vector<std::vector<int64_t>> sequences;
  std::vector<int64_t> labels;

  size_t size() const { return sequences.size(); }
  ToyCorpus Slice(size_t begin, size_t end) const;
};

ToyCorpus GenerateCorpus(const CorpusSpec& spec, int64_t n);

struct CorpusSplit {
  ToyCorpus train, val, test;
};
// Contiguous 80/10/10 split.
CorpusSplit SplitCorpus(const ToyCorpus& corpus);

// Majority topic over content tokens; ties and all-function sequences go
// to the lowest topic id.
int64_t LabelOf(const CorpusSpec& spec, const std::vector<int64_t>& tokens);

// Token-level stationary distribution averaged over classes.
std::vector<double> StationaryUnigram(const CorpusSpec& spec);
// The `num_stop_words` most probable tokens, ties to lower id, sorted by id.
std::vector<int64_t> StopWords(const CorpusSpec& spec);

// Line-delimited {"tokens":[...],"label":n}.
std::string CorpusToJsonl(const ToyCorpus& corpus);
ToyCorpus CorpusFromJsonl(const std::string& text, const CorpusSpec& spec);

}  // namespace osnip::toylm

#endif  // OSNIP_TOYLM_CORPUS_H_
