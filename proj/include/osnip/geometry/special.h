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

#ifndef OSNIP_GEOMETRY_SPECIAL_H_
#define OSNIP_GEOMETRY_SPECIAL_H_

namespace osnip::geometry {

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double RegularizedIncompleteBeta(double a, double b, double x);
// 1 - I_x(a, b) without cancellation.
double RegularizedIncompleteBetaComplement(double a, double b, double x);

}  // namespace osnip::geometry

#endif  // OSNIP_GEOMETRY_SPECIAL_H_
