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

#include "osnip/attacks/knn.h"

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"

namespace osnip::attacks {

std::vector<int64_t> KnnRanks(const Tensor& table, const Tensor& queries,
                              const std::vector<int64_t>& true_ids) {
  if (table.rank() != 2) throw ShapeError("KNN table must be a matrix");
  const Tensor q = queries.rank() == 1 ? queries.Reshaped({1, queries.size()}) : queries;
  if (q.cols() != table.cols()) {
    throw ShapeError("KNN query dimension " + std::to_string(q.cols()) + " != table dimension " +
                     std::to_string(table.cols()));
  }
  if (static_cast<int64_t>(true_ids.size()) != q.rows()) {
    throw ShapeError("KNN needs one true id per query");
  }
  const int64_t v = table.rows(), d = table.cols();
  for (int64_t id : true_ids) {
    if (id < 0 || id >= v) throw ShapeError("KNN true id out of range");
  }
  std::vector<int64_t> ranks(q.rows());
  ParallelFor(q.rows(), [&](int64_t i) {
    const double* z = q.data() + i * d;
    std::vector<double> dist(v);
    for (int64_t r = 0; r < v; ++r) {
      const double* e = table.data() + r * d;
      double s = 0.0;
      for (int64_t j = 0; j < d; ++j) {
        const double t = z[j] - e[j];
        s += t * t;
      }
      dist[r] = s;
    }
    const int64_t t = true_ids[i];
    int64_t rank = 0;
    for (int64_t r = 0; r < v; ++r) rank += dist[r] < dist[t] || (dist[r] == dist[t] && r < t);
    ranks[i] = rank;
  });
  return ranks;
}

AttackReport ReportFromRanks(const std::vector<int64_t>& ranks, const AttackConfig& cfg,
                             const char* attack) {
  cfg.Validate();
  if (ranks.empty()) throw ConfigError("attack on an empty token set");
  AttackReport rep;
  rep.attack = attack;
  rep.layer = 0;
  rep.n = static_cast<int64_t>(ranks.size());
  for (int64_t k : cfg.top_k) {
    int64_t hits = 0;
    for (int64_t r : ranks) hits += r < k;
    rep.asr[k] = static_cast<double>(hits) / static_cast<double>(rep.n);
  }
  return rep;
}

AttackReport KnnAttack(const Tensor& table, const Tensor& perturbed,
                       const std::vector<int64_t>& true_ids, const AttackConfig& cfg) {
  return ReportFromRanks(KnnRanks(table, perturbed, true_ids), cfg, "knn");
}

}  // namespace osnip::attacks
