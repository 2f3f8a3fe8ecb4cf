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

#ifndef OSNIP_EVALSUITE_STATS_H_
#define OSNIP_EVALSUITE_STATS_H_

#include <vector>

namespace osnip::evalsuite {

double Mean(const std::vector<double>& v);
double Median(std::vector<double> v);
// Ranks from 1, ties share their average rank.
std::vector<double> AverageRanks(const std::vector<double>& v);
double Pearson(const std::vector<double>& x, const std::vector<double>& y);
// Pearson correlation of the average ranks; NaN when either side is constant.
double Spearman(const std::vector<double>& x, const std::vector<double>& y);

// Point i is on the frontier iff no j has both asr[j] < asr[i] and
// rp[j] > rp[i].
std::vector<bool> ParetoFrontier(const std::vector<double>& asr, const std::vector<double>& rp);

}  // namespace osnip::evalsuite

#endif  // OSNIP_EVALSUITE_STATS_H_
