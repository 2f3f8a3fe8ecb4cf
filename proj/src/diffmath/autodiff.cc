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

#include "osnip/diffmath/autodiff.h"

#include <cmath>
#include <unordered_set>
#include <utility>

#include "osnip/diffmath/errors.h"
#include "osnip/diffmath/ops.h"

namespace osnip {
namespace ad {
namespace {

using BackwardFn = std::function<void(Node&)>;

Var Make(const char* op, Tensor value, std::vector<Var> parents, BackwardFn bw) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = std::move(value);
  for (const Var& p : parents) n->requires_grad = n->requires_grad || p->requires_grad;
  if (n->requires_grad) {
    n->parents = std::move(parents);
    n->backward = std::move(bw);
  }
  return n;
}

void Accum(Node& n, const Tensor& g) {
  if (!n.requires_grad) return;
  if (!n.has_grad) {
    n.grad = g.shape() == n.value.shape() ? g : g.Reshaped(n.value.shape());
    n.has_grad = true;
  } else {
    Tensor gg = g.shape() == n.value.shape() ? g : g.Reshaped(n.value.shape());
    ops::AddInPlace(n.grad, gg);
  }
}

Node& P(Node& self, int i) { return *self.parents[i]; }

Tensor Elementwise(const Tensor& a, double (*f)(double)) {
  Tensor out = a;
  for (double& x : out.vec()) x = f(x);
  return out;
}

}  // namespace

Var Constant(Tensor v) {
  auto n = std::make_shared<Node>();
  n->op = "constant";
  n->value = std::move(v);
  return n;
}

Var Variable(Tensor v) {
  auto n = std::make_shared<Node>();
  n->op = "variable";
  n->value = std::move(v);
  n->requires_grad = true;
  return n;
}

Var MatMul(const Var& a, const Var& b) {
  return Make("matmul", ops::MatMul(a->value, b->value), {a, b}, [](Node& s) {
    Accum(P(s, 0), ops::MatMulTransB(s.grad, P(s, 1).value));
    Accum(P(s, 1), ops::MatMulTransA(P(s, 0).value, s.grad));
  });
}

Var MatMulTransB(const Var& a, const Var& b) {
  return Make("matmul_tb", ops::MatMulTransB(a->value, b->value), {a, b}, [](Node& s) {
    Accum(P(s, 0), ops::MatMul(s.grad, P(s, 1).value));
    Accum(P(s, 1), ops::MatMulTransA(s.grad, P(s, 0).value));
  });
}

Var Add(const Var& a, const Var& b) {
  return Make("add", ops::Add(a->value, b->value), {a, b}, [](Node& s) {
    Accum(P(s, 0), s.grad);
    Accum(P(s, 1), s.grad);
  });
}

Var Sub(const Var& a, const Var& b) {
  return Make("sub", ops::Sub(a->value, b->value), {a, b}, [](Node& s) {
    Accum(P(s, 0), s.grad);
    Accum(P(s, 1), ops::Scale(s.grad, -1.0));
  });
}

Var Mul(const Var& a, const Var& b) {
  return Make("mul", ops::Mul(a->value, b->value), {a, b}, [](Node& s) {
    Accum(P(s, 0), ops::Mul(s.grad, P(s, 1).value));
    Accum(P(s, 1), ops::Mul(s.grad, P(s, 0).value));
  });
}

Var Div(const Var& a, const Var& b) {
  if (a->value.shape() != b->value.shape()) throw ShapeError("div: shape mismatch");
  for (double x : b->value.vec()) {
    if (x == 0.0) throw NumericError("division by zero");
  }
  Tensor y = a->value;
  for (int64_t i = 0; i < y.size(); ++i) y[i] /= b->value[i];
  return Make("div", y, {a, b}, [](Node& s) {
    const Tensor& bv = P(s, 1).value;
    Tensor ga = s.grad, gb = s.grad;
    for (int64_t i = 0; i < ga.size(); ++i) {
      ga[i] /= bv[i];
      gb[i] *= -s.value[i] / bv[i];
    }
    Accum(P(s, 0), ga);
    Accum(P(s, 1), gb);
  });
}

Var Scale(const Var& a, double c) {
  return Make("scale", ops::Scale(a->value, c), {a},
              [c](Node& s) { Accum(P(s, 0), ops::Scale(s.grad, c)); });
}

Var AddScalar(const Var& a, double c) {
  return Make("add_scalar", ops::AddScalar(a->value, c), {a},
              [](Node& s) { Accum(P(s, 0), s.grad); });
}

Var AddRowVector(const Var& a, const Var& row) {
  return Make("add_row", ops::AddRowVector(a->value, row->value), {a, row}, [](Node& s) {
    Accum(P(s, 0), s.grad);
    if (P(s, 1).requires_grad) Accum(P(s, 1), ops::ColumnSums(s.grad));
  });
}

Var MulRowScalars(const Var& a, const Var& sc) {
  return Make("mul_row_scalars", ops::MulRowScalars(a->value, sc->value), {a, sc},
              [](Node& s) {
                Accum(P(s, 0), ops::MulRowScalars(s.grad, P(s, 1).value));
                if (P(s, 1).requires_grad) {
                  Tensor ga = s.grad.Reshaped({P(s, 0).value.rows(), P(s, 0).value.cols()});
                  Tensor av = P(s, 0).value.Reshaped(ga.shape());
                  Accum(P(s, 1), ops::RowDot(ga, av));
                }
              });
}

Var Tanh(const Var& a) {
  Tensor y = Elementwise(a->value, [](double x) { return std::tanh(x); });
  return Make("tanh", y, {a}, [](Node& s) {
    Tensor g = s.grad;
    for (int64_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - s.value[i] * s.value[i];
    Accum(P(s, 0), g);
  });
}

Var Relu(const Var& a) {
  Tensor y = Elementwise(a->value, [](double x) { return x > 0.0 ? x : 0.0; });
  return Make("relu", y, {a}, [](Node& s) {
    Tensor g = s.grad;
    const Tensor& x = P(s, 0).value;
    for (int64_t i = 0; i < g.size(); ++i) g[i] = x[i] > 0.0 ? g[i] : 0.0;
    Accum(P(s, 0), g);
  });
}

Var Exp(const Var& a) {
  Tensor y = Elementwise(a->value, [](double x) { return std::exp(x); });
  y.CheckFinite("Exp");
  return Make("exp", y, {a}, [](Node& s) { Accum(P(s, 0), ops::Mul(s.grad, s.value)); });
}

Var Log(const Var& a) {
  for (double x : a->value.vec()) {
    if (!(x > 0.0)) throw NumericError("Log of non-positive value");
  }
  Tensor y = Elementwise(a->value, [](double x) { return std::log(x); });
  return Make("log", y, {a}, [](Node& s) {
    Tensor g = s.grad;
    const Tensor& x = P(s, 0).value;
    for (int64_t i = 0; i < g.size(); ++i) g[i] /= x[i];
    Accum(P(s, 0), g);
  });
}

Var Sqrt(const Var& a) {
  for (double x : a->value.vec()) {
    if (x < 0.0) throw NumericError("Sqrt of negative value");
  }
  Tensor y = Elementwise(a->value, [](double x) { return std::sqrt(x); });
  return Make("sqrt", y, {a}, [](Node& s) {
    Tensor g = s.grad;
    for (int64_t i = 0; i < g.size(); ++i) {
      if (s.value[i] == 0.0) throw NumericError("Sqrt gradient at zero");
      g[i] /= 2.0 * s.value[i];
    }
    Accum(P(s, 0), g);
  });
}

Var Abs(const Var& a) {
  Tensor y = Elementwise(a->value, [](double x) { return std::fabs(x); });
  return Make("abs", y, {a}, [](Node& s) {
    Tensor g = s.grad;
    const Tensor& x = P(s, 0).value;
    for (int64_t i = 0; i < g.size(); ++i) g[i] *= x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    Accum(P(s, 0), g);
  });
}

Var Reciprocal(const Var& a) {
  for (double x : a->value.vec()) {
    if (x == 0.0) throw NumericError("Reciprocal of zero");
  }
  Tensor y = Elementwise(a->value, [](double x) { return 1.0 / x; });
  return Make("reciprocal", y, {a}, [](Node& s) {
    Tensor g = s.grad;
    for (int64_t i = 0; i < g.size(); ++i) g[i] *= -s.value[i] * s.value[i];
    Accum(P(s, 0), g);
  });
}

Var Sum(const Var& a) {
  return Make("sum", Tensor::Scalar(ops::Sum(a->value)), {a}, [](Node& s) {
    Accum(P(s, 0), Tensor::Full(P(s, 0).value.shape(), s.grad.item()));
  });
}

Var Mean(const Var& a) {
  const double n = static_cast<double>(a->value.size());
  return Make("mean", Tensor::Scalar(ops::Sum(a->value) / n), {a}, [n](Node& s) {
    Accum(P(s, 0), Tensor::Full(P(s, 0).value.shape(), s.grad.item() / n));
  });
}

Var ColumnSums(const Var& a) {
  return Make("column_sums", ops::ColumnSums(a->value), {a}, [](Node& s) {
    Accum(P(s, 0), ops::BroadcastRow(s.grad, P(s, 0).value.rows()));
  });
}

Var RowSums(const Var& a) {
  return Make("row_sums", ops::RowSums(a->value), {a}, [](Node& s) {
    const Tensor& x = P(s, 0).value;
    Accum(P(s, 0), ops::MulRowScalars(Tensor::Full({x.rows(), x.cols()}, 1.0), s.grad));
  });
}

Var RowDot(const Var& a, const Var& b) {
  return Make("row_dot", ops::RowDot(a->value, b->value), {a, b}, [](Node& s) {
    Accum(P(s, 0), ops::MulRowScalars(P(s, 1).value, s.grad));
    Accum(P(s, 1), ops::MulRowScalars(P(s, 0).value, s.grad));
  });
}

Var RowNorms(const Var& a) {
  return Make("row_norms", ops::RowNorms(a->value), {a}, [](Node& s) {
    Tensor w = s.grad;
    for (int64_t i = 0; i < w.size(); ++i) {
      // Zero rows take the zero subgradient.
      w[i] = s.value[i] == 0.0 ? 0.0 : w[i] / s.value[i];
    }
    Accum(P(s, 0), ops::MulRowScalars(P(s, 0).value, w));
  });
}

Var LogSoftmaxRows(const Var& a) {
  return Make("log_softmax", ops::LogSoftmaxRows(a->value), {a}, [](Node& s) {
    const int64_t n = s.value.rows(), m = s.value.cols();
    Tensor g = s.grad;
    for (int64_t i = 0; i < n; ++i) {
      double gs = 0.0;
      for (int64_t j = 0; j < m; ++j) gs += s.grad[i * m + j];
      for (int64_t j = 0; j < m; ++j) g[i * m + j] -= std::exp(s.value[i * m + j]) * gs;
    }
    Accum(P(s, 0), g);
  });
}

Var SoftmaxRows(const Var& a) {
  return Make("softmax", ops::SoftmaxRows(a->value), {a}, [](Node& s) {
    const int64_t n = s.value.rows(), m = s.value.cols();
    Tensor g = s.grad;
    for (int64_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (int64_t j = 0; j < m; ++j) dot += s.grad[i * m + j] * s.value[i * m + j];
      for (int64_t j = 0; j < m; ++j) {
        g[i * m + j] = s.value[i * m + j] * (s.grad[i * m + j] - dot);
      }
    }
    Accum(P(s, 0), g);
  });
}

Var ConcatCols(const Var& a, const Var& b) {
  const int64_t p = a->value.cols();
  return Make("concat_cols", ops::ConcatCols(a->value, b->value), {a, b}, [p](Node& s) {
    const int64_t m = s.value.cols();
    if (P(s, 0).requires_grad) Accum(P(s, 0), ops::SliceCols(s.grad, 0, p));
    if (P(s, 1).requires_grad) Accum(P(s, 1), ops::SliceCols(s.grad, p, m));
  });
}

Var SliceCols(const Var& a, int64_t begin, int64_t end) {
  return Make("slice_cols", ops::SliceCols(a->value, begin, end), {a},
              [begin, end](Node& s) {
                const Tensor& x = P(s, 0).value;
                const int64_t n = x.rows(), m = x.cols(), w = end - begin;
                Tensor g({n, m});
                for (int64_t i = 0; i < n; ++i) {
                  for (int64_t j = 0; j < w; ++j) g[i * m + begin + j] = s.grad[i * w + j];
                }
                Accum(P(s, 0), g);
              });
}

Var BroadcastRow(const Var& row, int64_t n) {
  return Make("broadcast_row", ops::BroadcastRow(row->value, n), {row},
              [](Node& s) { Accum(P(s, 0), ops::ColumnSums(s.grad)); });
}

Var GatherRows(const Var& table, const std::vector<int64_t>& ids) {
  return Make("gather_rows", ops::GatherRows(table->value, ids), {table}, [ids](Node& s) {
    Tensor g(P(s, 0).value.shape());
    ops::ScatterAddRows(g, ids, s.grad);
    Accum(P(s, 0), g);
  });
}

Var CausalMeanPool(const Var& x, const std::vector<int64_t>& lengths) {
  return Make("causal_mean_pool", ops::CausalMeanPool(x->value, lengths), {x},
              [lengths](Node& s) {
                Accum(P(s, 0), ops::CausalMeanPoolBackward(s.grad, lengths));
              });
}

Var SegmentMean(const Var& x, const std::vector<int64_t>& lengths) {
  return Make("segment_mean", ops::SegmentMean(x->value, lengths), {x},
              [lengths](Node& s) {
                const Tensor& xv = P(s, 0).value;
                const int64_t m = xv.cols();
                Tensor g(xv.shape());
                int64_t row = 0;
                for (size_t k = 0; k < lengths.size(); ++k) {
                  const double inv = 1.0 / static_cast<double>(lengths[k]);
                  for (int64_t t = 0; t < lengths[k]; ++t, ++row) {
                    for (int64_t j = 0; j < m; ++j) g[row * m + j] = s.grad[k * m + j] * inv;
                  }
                }
                Accum(P(s, 0), g);
              });
}

Var Reshape(const Var& a, Shape shape) {
  return Make("reshape", a->value.Reshaped(std::move(shape)), {a},
              [](Node& s) { Accum(P(s, 0), s.grad.Reshaped(P(s, 0).value.shape())); });
}

Var Sign(const Var& a) {
  Tensor y = Elementwise(a->value, [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
  Var n = Make("sign", y, {a}, [](Node&) {});
  n->differentiable = false;
  return n;
}

void Backward(const Var& loss) {
  if (loss->value.size() != 1) {
    throw GraphError("loss must be a scalar, got shape " + ShapeString(loss->value.shape()));
  }
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack;
  if (loss->requires_grad) stack.push_back({loss.get(), 0});
  seen.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* n : order) n->has_grad = false;
  if (!loss->requires_grad) return;
  loss->grad = Tensor::Full(loss->value.shape(), 1.0);
  loss->has_grad = true;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->has_grad || !n->backward) continue;
    if (!n->differentiable) {
      throw GraphError(std::string("gradient path through non-differentiable op '") +
                       n->op + "'");
    }
    n->backward(*n);
  }
}

std::vector<Tensor> GradWrt(const Var& loss, const std::vector<Var>& wrt) {
  Backward(loss);
  std::vector<Tensor> out;
  for (const Var& v : wrt) out.push_back(v->has_grad ? v->grad : Tensor(v->value.shape()));
  return out;
}

}  // namespace ad

void ParamStore::Add(const std::string& name, Tensor value, bool trainable) {
  if (entries_.count(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  value.CheckFinite("parameter " + name);
  entries_[name] = Entry{std::move(value), trainable};
}

bool ParamStore::Has(const std::string& name) const { return entries_.count(name) > 0; }

const ParamStore::Entry& ParamStore::Find(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::Get(const std::string& name) const { return Find(name).value; }

Tensor& ParamStore::Mutable(const std::string& name) {
  Find(name);
  Entry& e = entries_[name];
  if (!e.trainable) throw ConfigError("parameter '" + name + "' is frozen");
  return e.value;
}

void ParamStore::Set(const std::string& name, Tensor value) {
  Tensor& dst = Mutable(name);
  if (dst.shape() != value.shape()) throw ShapeError("Set: shape change for '" + name + "'");
  value.CheckFinite("parameter " + name);
  dst = std::move(value);
}

bool ParamStore::Trainable(const std::string& name) const { return Find(name).trainable; }

void ParamStore::SetTrainable(const std::string& name, bool trainable) {
  Find(name);
  entries_[name].trainable = trainable;
}

void ParamStore::FreezeAll() {
  for (auto& [name, e] : entries_) e.trainable = false;
}

std::vector<std::string> ParamStore::Names() const {
  std::vector<std::string> out;
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

ad::Var ParamStore::Var(const std::string& name) const {
  const Entry& e = Find(name);
  auto n = std::make_shared<ad::Node>();
  n->op = "param";
  n->param = name;
  n->value = e.value;
  n->requires_grad = e.trainable;
  return n;
}

std::map<std::string, Tensor> Grad(const ad::Var& loss, const ParamStore& store) {
  ad::Backward(loss);
  std::map<std::string, Tensor> out;
  for (const std::string& name : store.Names()) {
    if (store.Trainable(name)) out[name] = Tensor(store.Get(name).shape());
  }
  std::vector<ad::Node*> stack{loss.get()};
  std::unordered_set<ad::Node*> seen{loss.get()};
  while (!stack.empty()) {
    ad::Node* n = stack.back();
    stack.pop_back();
    if (!n->param.empty() && n->has_grad) {
      auto it = out.find(n->param);
      if (it != out.end()) ops::AddInPlace(it->second, n->grad);
    }
    for (const ad::Var& p : n->parents) {
      if (seen.insert(p.get()).second) stack.push_back(p.get());
    }
  }
  return out;
}

}  // namespace osnip
