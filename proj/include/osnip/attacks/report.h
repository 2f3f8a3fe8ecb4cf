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

#ifndef OSNIP_ATTACKS_REPORT_H_
#define OSNIP_ATTACKS_REPORT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace osnip::attacks {

enum class KeyMode { kNone, kRandom, kOracle };

KeyMode ParseKeyMode(const std::string& s);
std::string KeyModeName(KeyMode m);

struct AttackConfig {
  std::vector<int64_t> top_k = {1, 5, 10};
  uint64_t seed = 42;
  int64_t layer = 0;
  KeyMode key_mode = KeyMode::kNone;
  // Vocabulary matching against states of isolated tokens instead of the
  // recovered prefix (cheaper, not autoregressive).
  bool vocab_precomputed = false;
  // Restricts vocabulary-matching candidates; empty means the full vocabulary.
  std::vector<int64_t> candidates;

  void Validate() const;
};

struct AttackReport {
  std::string model;
  std::string attack;
  int64_t layer = 0;
  std::map<int64_t, double> asr;  // top-k success rates
  bool has_clean = false;
  double total_asr = 0.0;
  double clean_asr = 0.0;
  int64_t n = 0;
  int64_t n_clean = 0;

  double At(int64_t k) const;
  nlohmann::json ToJson() const;
};

inline constexpr const char* kReportCsvHeader = "model,attack,layer,k,asr,clean_asr,n";

// One row per k; vocabulary reports have a single k = 1 row with clean_asr.
std::string ReportCsvRows(const AttackReport& r);
std::string ReportsCsv(const std::vector<AttackReport>& reports);

}  // namespace osnip::attacks

#endif  // OSNIP_ATTACKS_REPORT_H_
