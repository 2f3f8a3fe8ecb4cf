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

#include "osnip/attacks/report.h"

#include <sstream>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/util.h"

namespace osnip::attacks {

KeyMode ParseKeyMode(const std::string& s) {
  if (s == "none") return KeyMode::kNone;
  if (s == "random") return KeyMode::kRandom;
  if (s == "oracle") return KeyMode::kOracle;
  throw ConfigError("unknown key mode '" + s + "'");
}

std::string KeyModeName(KeyMode m) {
  switch (m) {
    case KeyMode::kNone: return "none";
    case KeyMode::kRandom: return "random";
    case KeyMode::kOracle: return "oracle";
  }
  return "none";
}

void AttackConfig::Validate() const {
  if (top_k.empty()) throw ConfigError("attack.top_k must not be empty");
  for (int64_t k : top_k) {
    if (k < 1) throw ConfigError("attack.top_k entries must be >= 1");
  }
  if (layer < 0) throw ConfigError("attack.layer must be >= 0");
}

double AttackReport::At(int64_t k) const {
  const auto it = asr.find(k);
  if (it == asr.end()) throw ConfigError("report has no top-" + std::to_string(k) + " entry");
  return it->second;
}

nlohmann::json AttackReport::ToJson() const {
  nlohmann::json j = {{"model", model}, {"attack", attack}, {"layer", layer}, {"n", n}};
  nlohmann::json per_k = nlohmann::json::object();
  for (const auto& [k, v] : asr) per_k[std::to_string(k)] = v;
  j["asr"] = per_k;
  if (has_clean) {
    j["total_asr"] = total_asr;
    j["clean_asr"] = clean_asr;
    j["n_clean"] = n_clean;
  }
  return j;
}

std::string ReportCsvRows(const AttackReport& r) {
  std::ostringstream os;
  for (const auto& [k, v] : r.asr) {
    os << r.model << ',' << r.attack << ',' << r.layer << ',' << k << ',' << FormatDouble(v) << ','
       << (r.has_clean ? FormatDouble(r.clean_asr) : "") << ',' << r.n << '\n';
  }
  return os.str();
}

std::string ReportsCsv(const std::vector<AttackReport>& reports) {
  std::string s = std::string(kReportCsvHeader) + "\n";
  for (const AttackReport& r : reports) s += ReportCsvRows(r);
  return s;
}

}  // namespace osnip::attacks
