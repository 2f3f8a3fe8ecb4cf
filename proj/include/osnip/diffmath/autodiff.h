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

// Reverse-mode differentiation over Tensor values. Every op computes its
// value eagerly with the kernels in ops.h and records a backward closure only
// when some input requires a gradient.

#ifndef OSNIP_DIFFMATH_AUTODIFF_H_
#define OSNIP_DIFFMATH_AUTODIFF_H_

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "osnip/diffmath/tensor.h"

namespace osnip {

namespace ad {

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
  Tensor value;
  Tensor grad;
  bool has_grad = false;
  bool requires_grad = false;
  bool differentiable = true;
  const char* op = "leaf";
  std::string param;
  std::vector<Var> parents;
  std::function<void(Node&)> backward;
};

Var Constant(Tensor v);
// A free variable that receives a gradient (tests, probes).
Var Variable(Tensor v);

Var MatMul(const Var& a, const Var& b);
Var MatMulTransB(const Var& a, const Var& b);
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Div(const Var& a, const Var& b);
Var Scale(const Var& a, double s);
Var AddScalar(const Var& a, double s);
Var AddRowVector(const Var& a, const Var& row);
Var MulRowScalars(const Var& a, const Var& s);
Var Tanh(const Var& a);
Var Relu(const Var& a);
Var Exp(const Var& a);
Var Log(const Var& a);
Var Sqrt(const Var& a);
Var Abs(const Var& a);
Var Reciprocal(const Var& a);
Var Sum(const Var& a);
Var Mean(const Var& a);
Var ColumnSums(const Var& a);
Var RowSums(const Var& a);
Var RowDot(const Var& a, const Var& b);
Var RowNorms(const Var& a);  // zero rows get a zero gradient
Var LogSoftmaxRows(const Var& a);
Var SoftmaxRows(const Var& a);
Var ConcatCols(const Var& a, const Var& b);
Var SliceCols(const Var& a, int64_t begin, int64_t end);
Var BroadcastRow(const Var& row, int64_t n);
Var GatherRows(const Var& table, const std::vector<int64_t>& ids);
Var CausalMeanPool(const Var& x, const std::vector<int64_t>& lengths);
Var SegmentMean(const Var& x, const std::vector<int64_t>& lengths);
Var Reshape(const Var& a, Shape shape);
// Piecewise-constant; differentiating through it is a GraphError.
Var Sign(const Var& a);

// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every node that
// requires one. Throws GraphError on a non-scalar loss or when a
// non-differentiable node lies on a gradient path.
void Backward(const Var& loss);

// Gradients of `loss` with respect to `wrt`, in order. Unreached inputs get zeros.
std::vector<Tensor> GradWrt(const Var& loss, const std::vector<Var>& wrt);

}  // namespace ad

// Named parameters with a trainable flag. Names iterate in sorted order.
class ParamStore {
 public:
  void Add(const std::string& name, Tensor value, bool trainable = true);
  bool Has(const std::string& name) const;
  const Tensor& Get(const std::string& name) const;
  Tensor& Mutable(const std::string& name);
  void Set(const std::string& name, Tensor value);
  bool Trainable(const std::string& name) const;
  void SetTrainable(const std::string& name, bool trainable);
  void FreezeAll();
  std::vector<std::string> Names() const;
  size_t size() const { return entries_.size(); }

  // Leaf holding a copy of the parameter; requires a gradient iff trainable.
  ad::Var Var(const std::string& name) const;

 private:
  struct Entry {
    Tensor value;
    bool trainable = true;
  };
  const Entry& Find(const std::string& name) const;
  std::map<std::string, Entry> entries_;
};

// One gradient per trainable parameter reachable from `loss`; trainable
// parameters not on the graph get zeros, frozen ones get no entry.
std::map<std::string, Tensor> Grad(const ad::Var& loss, const ParamStore& store);

}  // namespace osnip

#endif  // OSNIP_DIFFMATH_AUTODIFF_H_
