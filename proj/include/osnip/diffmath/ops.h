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

// Plain (non-recording) tensor kernels. Matrices are rank 2; rank-1 inputs
// are accepted wherever a single row makes sense.

#ifndef OSNIP_DIFFMATH_OPS_H_
#define OSNIP_DIFFMATH_OPS_H_

#include <cstdint>
#include <vector>

#include "osnip/diffmath/tensor.h"

namespace osnip::ops {

Tensor MatMul(const Tensor& a, const Tensor& b);       // a·b
Tensor MatMulTransB(const Tensor& a, const Tensor& b);  // a·bᵀ
Tensor MatMulTransA(const Tensor& a, const Tensor& b);  // aᵀ·b

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double s);
Tensor AddScalar(const Tensor& a, double s);
void AddInPlace(Tensor& acc, const Tensor& x);

Tensor AddRowVector(const Tensor& a, const Tensor& row);
Tensor MulRowScalars(const Tensor& a, const Tensor& s);
Tensor ColumnSums(const Tensor& a);  // [n,m] -> [m]
Tensor RowSums(const Tensor& a);     // [n,m] -> [n]
Tensor RowDot(const Tensor& a, const Tensor& b);
Tensor RowNorms(const Tensor& a);
double Sum(const Tensor& a);
double Dot(const Tensor& a, const Tensor& b);
double Norm(const Tensor& a);

// 1-D softmax; throws on empty input.
Tensor Softmax(const Tensor& logits);
Tensor SoftmaxRows(const Tensor& logits);
Tensor LogSoftmaxRows(const Tensor& logits);

Tensor ConcatCols(const Tensor& a, const Tensor& b);
Tensor SliceCols(const Tensor& a, int64_t begin, int64_t end);
Tensor BroadcastRow(const Tensor& row, int64_t n);
Tensor GatherRows(const Tensor& table, const std::vector<int64_t>& ids);
void ScatterAddRows(Tensor& table, const std::vector<int64_t>& ids,
                    const Tensor& rows);

// Row i becomes the mean of rows [start(i), i] where start(i) is the first
// row of the segment holding i. `lengths` must sum to the row count.
Tensor CausalMeanPool(const Tensor& x, const std::vector<int64_t>& lengths);
Tensor CausalMeanPoolBackward(const Tensor& g, const std::vector<int64_t>& lengths);

// Per-segment mean, [N,m] -> [segments,m].
Tensor SegmentMean(const Tensor& x, const std::vector<int64_t>& lengths);

inline constexpr double kProbFloor = 1e-300;

// Row-wise KL(p || q) with q floored at kProbFloor; terms with p = 0 vanish.
// Sets *floored when the floor was hit.
Tensor KlRows(const Tensor& p, const Tensor& q, bool* floored = nullptr);

}  // namespace osnip::ops

#endif  // OSNIP_DIFFMATH_OPS_H_
