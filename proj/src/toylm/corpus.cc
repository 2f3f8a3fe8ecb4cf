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

#include "osnip/toylm/corpus.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"
#include "osnip/diffmath/util.h"

namespace osnip::toylm {
namespace {

constexpr uint64_t kTableStream = 1;
constexpr uint64_t kSequenceStream = 2;

int64_t SampleCdf(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.Uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<int64_t>(it - cdf.begin(), static_cast<int64_t>(cdf.size()) - 1);
}

std::vector<double> Cdf(const double* p, int64_t n) {
  std::vector<double> c(n);
  std::partial_sum(p, p + n, c.begin());
  return c;
}

Tensor StationaryPairs(const Tensor& a, const Tensor& b, double beta) {
  const int64_t n = a.rows();
  Tensor pi = Tensor::Full({n, n}, 1.0 / static_cast<double>(n * n));
  for (int it = 0; it < 10000; ++it) {
    const Tensor marg = ops::ColumnSums(pi);  // p(b) = sum_a pi(a, b)
    Tensor next = ops::Scale(ops::MatMulTransA(pi, b), 1.0 - beta);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < n; ++j) next.at(i, j) += beta * marg[i] * a.at(i, j);
    }
    next = ops::Scale(next, 1.0 / ops::Sum(next));
    double diff = 0.0;
    for (int64_t i = 0; i < next.size(); ++i) diff = std::max(diff, std::fabs(next[i] - pi[i]));
    pi = std::move(next);
    if (diff < 1e-16) break;
  }
  return pi;
}

}  // namespace

int64_t CorpusSpec::NumConcepts() const {
  return num_function + (vocab_size - num_function) / synonyms;
}

int64_t CorpusSpec::ConceptOf(int64_t token) const {
  if (token < 0 || token >= vocab_size) throw ShapeError("token id out of range");
  return token < num_function ? token : num_function + (token - num_function) / synonyms;
}

int64_t CorpusSpec::TopicOfConcept(int64_t c) const {
  return c < num_function ? -1 : (c - num_function) % num_topics;
}

void CorpusSpec::Validate() const {
  if (vocab_size < 8) throw ConfigError("corpus.vocab_size must be >= 8");
  if (num_function < 1 || num_function >= vocab_size) {
    throw ConfigError("corpus.num_function must be in [1, vocab_size)");
  }
  if (synonyms < 1 || (vocab_size - num_function) % synonyms != 0) {
    throw ConfigError("corpus.synonyms must divide vocab_size - num_function");
  }
  if (num_topics < 2 || (vocab_size - num_function) / synonyms < num_topics) {
    throw ConfigError("corpus.num_topics must be >= 2 with a content concept per topic");
  }
  if (min_len < 2 || max_len < min_len) throw ConfigError("corpus lengths need 2 <= min_len <= max_len");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("corpus.beta must be in [0, 1]");
  if (!(function_weight > 0 && own_topic_boost > 0 && other_topic_boost > 0)) {
    throw ConfigError("corpus weights must be positive");
  }
  if (!(log_weight_sigma >= 0.0)) throw ConfigError("corpus.log_weight_sigma must be >= 0");
  if (num_stop_words < 0 || num_stop_words > vocab_size) {
    throw ConfigError("corpus.num_stop_words out of range");
  }
}

ChainTables BuildChains(const CorpusSpec& spec) {
  spec.Validate();
  const int64_t nc = spec.NumConcepts();
  Rng rng = Rng(spec.seed).Split(kTableStream);
  auto base_table = [&] {
    Tensor w({nc, nc});
    for (int64_t i = 0; i < nc; ++i) {
      for (int64_t j = 0; j < nc; ++j) {
        const double base = spec.TopicOfConcept(j) < 0 ? spec.function_weight : 1.0;
        w.at(i, j) = base * std::exp(spec.log_weight_sigma * rng.Normal());
      }
    }
    return w;
  };
  const Tensor a = base_table();
  const Tensor b = base_table();
  ChainTables out;
  for (int64_t c = 0; c < spec.num_topics; ++c) {
    auto boosted = [&](const Tensor& t) {
      Tensor r = t;
      for (int64_t i = 0; i < nc; ++i) {
        double s = 0.0;
        for (int64_t j = 0; j < nc; ++j) {
          const int64_t tp = spec.TopicOfConcept(j);
          r.at(i, j) *= tp < 0 ? 1.0 : (tp == c ? spec.own_topic_boost : spec.other_topic_boost);
          s += r.at(i, j);
        }
        for (int64_t j = 0; j < nc; ++j) r.at(i, j) /= s;
      }
      return r;
    };
    out.a.push_back(boosted(a));
    out.b.push_back(boosted(b));
    out.pairs.push_back(StationaryPairs(out.a.back(), out.b.back(), spec.beta));
  }
  return out;
}

ToyCorpus ToyCorpus::Slice(size_t begin, size_t end) const {
  ToyCorpus out;
  out.spec = spec;
  out.sequences.assign(sequences.begin() + begin, sequences.begin() + end);
  out.labels.assign(labels.begin() + begin, labels.begin() + end);
  return out;
}

int64_t LabelOf(const CorpusSpec& spec, const std::vector<int64_t>& tokens) {
  std::vector<int64_t> counts(spec.num_topics, 0);
  for (int64_t t : tokens) {
    const int64_t tp = spec.TopicOfToken(t);
    if (tp >= 0) ++counts[tp];
  }
  return std::max_element(counts.begin(), counts.end()) - counts.begin();
}

ToyCorpus GenerateCorpus(const CorpusSpec& spec, int64_t n) {
  if (n < 1) throw ConfigError("corpus size must be >= 1");
  const ChainTables chains = BuildChains(spec);
  const int64_t nc = spec.NumConcepts();
  std::vector<std::vector<std::vector<double>>> cdf_a(spec.num_topics), cdf_b(spec.num_topics);
  std::vector<std::vector<double>> cdf_pairs(spec.num_topics);
  for (int64_t c = 0; c < spec.num_topics; ++c) {
    for (int64_t i = 0; i < nc; ++i) {
      cdf_a[c].push_back(Cdf(chains.a[c].data() + i * nc, nc));
      cdf_b[c].push_back(Cdf(chains.b[c].data() + i * nc, nc));
    }
    cdf_pairs[c] = Cdf(chains.pairs[c].data(), nc * nc);
  }
  ToyCorpus out;
  out.spec = spec;
  out.sequences.resize(n);
  out.labels.resize(n);
  const Rng root = Rng(spec.seed).Split(kSequenceStream);
  ParallelFor(n, [&](int64_t i) {
    Rng rng = root.Split(static_cast<uint64_t>(i));
    const int64_t cls = static_cast<int64_t>(rng.UniformInt(spec.num_topics));
    const int64_t len =
        spec.min_len + static_cast<int64_t>(rng.UniformInt(spec.max_len - spec.min_len + 1));
    const int64_t pair = SampleCdf(cdf_pairs[cls], rng);
    std::vector<int64_t> concepts = {pair / nc, pair % nc};
    while (static_cast<int64_t>(concepts.size()) < len) {
      const int64_t prev2 = concepts[concepts.size() - 2];
      const int64_t prev1 = concepts.back();
      concepts.push_back(rng.Uniform() < spec.beta ? SampleCdf(cdf_a[cls][prev1], rng)
                                                   : SampleCdf(cdf_b[cls][prev2], rng));
    }
    std::vector<int64_t> tokens;
    for (int64_t c : concepts) {
      if (c < spec.num_function) {
        tokens.push_back(c);
      } else {
        tokens.push_back(spec.num_function + spec.synonyms * (c - spec.num_function) +
                         static_cast<int64_t>(rng.UniformInt(spec.synonyms)));
      }
    }
    out.labels[i] = LabelOf(spec, tokens);
    out.sequences[i] = std::move(tokens);
  });
  return out;
}

CorpusSplit SplitCorpus(const ToyCorpus& corpus) {
  const size_t n = corpus.size();
  const size_t n_train = n * 8 / 10;
  const size_t n_val = n / 10;
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw ConfigError("corpus too small for an 80/10/10 split");
  }
  return {corpus.Slice(0, n_train), corpus.Slice(n_train, n_train + n_val),
          corpus.Slice(n_train + n_val, n)};
}

std::vector<double> StationaryUnigram(const CorpusSpec& spec) {
  const ChainTables chains = BuildChains(spec);
  const int64_t nc = spec.NumConcepts();
  std::vector<double> concept_p(nc, 0.0);
  for (const Tensor& pi : chains.pairs) {
    const Tensor marg = ops::ColumnSums(pi);
    for (int64_t j = 0; j < nc; ++j) concept_p[j] += marg[j] / static_cast<double>(spec.num_topics);
  }
  std::vector<double> out(spec.vocab_size);
  for (int64_t t = 0; t < spec.vocab_size; ++t) {
    const int64_t c = spec.ConceptOf(t);
    out[t] = concept_p[c] / (c < spec.num_function ? 1.0 : static_cast<double>(spec.synonyms));
  }
  return out;
}

std::vector<int64_t> StopWords(const CorpusSpec& spec) {
  const std::vector<double> p = StationaryUnigram(spec);
  std::vector<int64_t> ids(p.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int64_t a, int64_t b) { return p[a] > p[b]; });
  ids.resize(spec.num_stop_words);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string CorpusToJsonl(const ToyCorpus& corpus) {
  std::string out;
  for (size_t i = 0; i < corpus.size(); ++i) {
    nlohmann::json j;
    j["tokens"] = corpus.sequences[i];
    j["label"] = corpus.labels[i];
    out += j.dump();
    out += '\n';
  }
  return out;
}

ToyCorpus CorpusFromJsonl(const std::string& text, const CorpusSpec& spec) {
  ToyCorpus out;
  out.spec = spec;
  std::istringstream in(text);
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      std::vector<int64_t> tokens = j.at("tokens").get<std::vector<int64_t>>();
      for (int64_t t : tokens) {
        if (t < 0 || t >= spec.vocab_size) throw IoError("token id out of range");
      }
      out.labels.push_back(j.at("label").get<int64_t>());
      out.sequences.push_back(std::move(tokens));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("corpus line " + std::to_string(lineno) + ": " + e.what());
    } catch (const IoError& e) {
      throw IoError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.sequences.empty()) throw IoError("corpus file has no records");
  return out;
}

}  // namespace osnip::toylm
