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

#include "osnip/diffmath/ops.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "osnip/diffmath/errors.h"

namespace osnip::ops {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;

CMap AsMat(const Tensor& t) { return CMap(t.data(), t.rows(), t.cols()); }

void RequireMatrixLike(const Tensor& t, const char* op) {
  if (t.rank() != 1 && t.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected rank 1 or 2, got " +
                     ShapeString(t.shape()));
  }
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape " + ShapeString(a.shape()) +
                     " vs " + ShapeString(b.shape()));
  }
}

void RequireSegments(const std::vector<int64_t>& lengths, int64_t n) {
  int64_t total = 0;
  for (int64_t l : lengths) {
    if (l <= 0) throw ShapeError("segment length must be positive");
    total += l;
  }
  if (total != n) throw ShapeError("segment lengths do not cover all rows");
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireMatrixLike(a, "MatMul");
  RequireMatrixLike(b, "MatMul");
  if (a.cols() != b.rows()) {
    throw ShapeError("MatMul: " + ShapeString(a.shape()) + " x " + ShapeString(b.shape()));
  }
  Tensor out({a.rows(), b.cols()});
  MMap(out.data(), a.rows(), b.cols()).noalias() = AsMat(a) * AsMat(b);
  return out;
}

Tensor MatMulTransB(const Tensor& a, const Tensor& b) {
  RequireMatrixLike(a, "MatMulTransB");
  RequireMatrixLike(b, "MatMulTransB");
  if (a.cols() != b.cols()) {
    throw ShapeError("MatMulTransB: " + ShapeString(a.shape()) + " x " +
                     ShapeString(b.shape()) + "^T");
  }
  Tensor out({a.rows(), b.rows()});
  MMap(out.data(), a.rows(), b.rows()).noalias() = AsMat(a) * AsMat(b).transpose();
  return out;
}

Tensor MatMulTransA(const Tensor& a, const Tensor& b) {
  RequireMatrixLike(a, "MatMulTransA");
  RequireMatrixLike(b, "MatMulTransA");
  if (a.rows() != b.rows()) {
    throw ShapeError("MatMulTransA: " + ShapeString(a.shape()) + "^T x " +
                     ShapeString(b.shape()));
  }
  Tensor out({a.cols(), b.cols()});
  MMap(out.data(), a.cols(), b.cols()).noalias() = AsMat(a).transpose() * AsMat(b);
  return out;
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Add");
  Tensor out = a;
  for (int64_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Sub");
  Tensor out = a;
  for (int64_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Mul");
  Tensor out = a;
  for (int64_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Tensor Scale(const Tensor& a, double s) {
  Tensor out = a;
  for (double& x : out.vec()) x *= s;
  return out;
}

Tensor AddScalar(const Tensor& a, double s) {
  Tensor out = a;
  for (double& x : out.vec()) x += s;
  return out;
}

void AddInPlace(Tensor& acc, const Tensor& x) {
  RequireSameShape(acc, x, "AddInPlace");
  for (int64_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

Tensor AddRowVector(const Tensor& a, const Tensor& row) {
  RequireMatrixLike(a, "AddRowVector");
  const int64_t n = a.rows(), m = a.cols();
  if (row.size() != m) throw ShapeError("AddRowVector: width mismatch");
  Tensor out = a;
  for (int64_t i = 0; i < n; ++i) {
    double* r = out.data() + i * m;
    for (int64_t j = 0; j < m; ++j) r[j] += row[j];
  }
  return out;
}

Tensor MulRowScalars(const Tensor& a, const Tensor& s) {
  RequireMatrixLike(a, "MulRowScalars");
  const int64_t n = a.rows(), m = a.cols();
  if (s.size() != n) throw ShapeError("MulRowScalars: row count mismatch");
  Tensor out = a;
  for (int64_t i = 0; i < n; ++i) {
    double* r = out.data() + i * m;
    for (int64_t j = 0; j < m; ++j) r[j] *= s[i];
  }
  return out;
}

Tensor ColumnSums(const Tensor& a) {
  RequireMatrixLike(a, "ColumnSums");
  const int64_t n = a.rows(), m = a.cols();
  Tensor out({m});
  for (int64_t i = 0; i < n; ++i) {
    const double* r = a.data() + i * m;
    for (int64_t j = 0; j < m; ++j) out[j] += r[j];
  }
  return out;
}

Tensor RowSums(const Tensor& a) {
  RequireMatrixLike(a, "RowSums");
  const int64_t n = a.rows(), m = a.cols();
  Tensor out({n});
  for (int64_t i = 0; i < n; ++i) {
    const double* r = a.data() + i * m;
    double s = 0.0;
    for (int64_t j = 0; j < m; ++j) s += r[j];
    out[i] = s;
  }
  return out;
}

Tensor RowDot(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "RowDot");
  const int64_t n = a.rows(), m = a.cols();
  Tensor out({n});
  for (int64_t i = 0; i < n; ++i) {
    const double* x = a.data() + i * m;
    const double* y = b.data() + i * m;
    double s = 0.0;
    for (int64_t j = 0; j < m; ++j) s += x[j] * y[j];
    out[i] = s;
  }
  return out;
}

Tensor RowNorms(const Tensor& a) {
  Tensor out = RowDot(a, a);
  for (double& x : out.vec()) x = std::sqrt(x);
  return out;
}

double Sum(const Tensor& a) {
  double s = 0.0;
  for (double x : a.vec()) s += x;
  return s;
}

double Dot(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) throw ShapeError("Dot: size mismatch");
  double s = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm(const Tensor& a) { return std::sqrt(Dot(a, a)); }

Tensor Softmax(const Tensor& logits) {
  if (logits.rank() != 1) throw ShapeError("Softmax: expected a 1-D tensor");
  return SoftmaxRows(logits);
}

Tensor SoftmaxRows(const Tensor& logits) {
  Tensor out = LogSoftmaxRows(logits);
  for (double& x : out.vec()) x = std::exp(x);
  return out;
}

Tensor LogSoftmaxRows(const Tensor& logits) {
  RequireMatrixLike(logits, "LogSoftmaxRows");
  const int64_t n = logits.rows(), m = logits.cols();
  logits.CheckFinite("LogSoftmaxRows input");
  Tensor out = logits;
  for (int64_t i = 0; i < n; ++i) {
    double* r = out.data() + i * m;
    const double mx = *std::max_element(r, r + m);
    double s = 0.0;
    for (int64_t j = 0; j < m; ++j) s += std::exp(r[j] - mx);
    const double lse = mx + std::log(s);
    for (int64_t j = 0; j < m; ++j) r[j] -= lse;
  }
  return out;
}

Tensor ConcatCols(const Tensor& a, const Tensor& b) {
  RequireMatrixLike(a, "ConcatCols");
  RequireMatrixLike(b, "ConcatCols");
  const int64_t n = a.rows();
  if (b.rows() != n) throw ShapeError("ConcatCols: row count mismatch");
  const int64_t p = a.cols(), q = b.cols();
  Tensor out({n, p + q});
  for (int64_t i = 0; i < n; ++i) {
    std::copy(a.data() + i * p, a.data() + (i + 1) * p, out.data() + i * (p + q));
    std::copy(b.data() + i * q, b.data() + (i + 1) * q, out.data() + i * (p + q) + p);
  }
  return out;
}

Tensor SliceCols(const Tensor& a, int64_t begin, int64_t end) {
  RequireMatrixLike(a, "SliceCols");
  const int64_t n = a.rows(), m = a.cols();
  if (begin < 0 || end > m || begin >= end) throw ShapeError("SliceCols: bad range");
  const int64_t w = end - begin;
  Tensor out({n, w});
  for (int64_t i = 0; i < n; ++i) {
    std::copy(a.data() + i * m + begin, a.data() + i * m + end, out.data() + i * w);
  }
  return out;
}

Tensor BroadcastRow(const Tensor& row, int64_t n) {
  const int64_t m = row.size();
  Tensor out({n, m});
  for (int64_t i = 0; i < n; ++i) std::copy(row.data(), row.data() + m, out.data() + i * m);
  return out;
}

Tensor GatherRows(const Tensor& table, const std::vector<int64_t>& ids) {
  if (table.rank() != 2) throw ShapeError("GatherRows: table must be rank 2");
  const int64_t v = table.rows(), m = table.cols();
  if (ids.empty()) throw ShapeError("GatherRows: empty id list");
  Tensor out({static_cast<int64_t>(ids.size()), m});
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= v) {
      throw ShapeError("GatherRows: id " + std::to_string(ids[i]) + " out of range");
    }
    std::copy(table.data() + ids[i] * m, table.data() + (ids[i] + 1) * m,
              out.data() + i * m);
  }
  return out;
}

void ScatterAddRows(Tensor& table, const std::vector<int64_t>& ids, const Tensor& rows) {
  const int64_t m = table.cols();
  for (size_t i = 0; i < ids.size(); ++i) {
    double* dst = table.data() + ids[i] * m;
    const double* src = rows.data() + i * m;
    for (int64_t j = 0; j < m; ++j) dst[j] += src[j];
  }
}

Tensor CausalMeanPool(const Tensor& x, const std::vector<int64_t>& lengths) {
  RequireMatrixLike(x, "CausalMeanPool");
  const int64_t n = x.rows(), m = x.cols();
  RequireSegments(lengths, n);
  Tensor out({n, m});
  std::vector<double> run(m);
  int64_t row = 0;
  for (int64_t len : lengths) {
    std::fill(run.begin(), run.end(), 0.0);
    for (int64_t t = 0; t < len; ++t, ++row) {
      const double* src = x.data() + row * m;
      double* dst = out.data() + row * m;
      const double cnt = static_cast<double>(t + 1);
      for (int64_t j = 0; j < m; ++j) {
        run[j] += src[j];
        dst[j] = run[j] / cnt;
      }
    }
  }
  return out;
}

Tensor CausalMeanPoolBackward(const Tensor& g, const std::vector<int64_t>& lengths) {
  const int64_t n = g.rows(), m = g.cols();
  RequireSegments(lengths, n);
  Tensor out({n, m});
  std::vector<double> run(m);
  int64_t end = n;
  for (auto it = lengths.rbegin(); it != lengths.rend(); ++it) {
    const int64_t len = *it;
    const int64_t start = end - len;
    std::fill(run.begin(), run.end(), 0.0);
    for (int64_t t = len - 1; t >= 0; --t) {
      const double* src = g.data() + (start + t) * m;
      double* dst = out.data() + (start + t) * m;
      const double cnt = static_cast<double>(t + 1);
      for (int64_t j = 0; j < m; ++j) {
        run[j] += src[j] / cnt;
        dst[j] = run[j];
      }
    }
    end = start;
  }
  return out;
}

Tensor SegmentMean(const Tensor& x, const std::vector<int64_t>& lengths) {
  RequireMatrixLike(x, "SegmentMean");
  const int64_t n = x.rows(), m = x.cols();
  RequireSegments(lengths, n);
  Tensor out({static_cast<int64_t>(lengths.size()), m});
  int64_t row = 0;
  for (size_t s = 0; s < lengths.size(); ++s) {
    double* dst = out.data() + s * m;
    for (int64_t t = 0; t < lengths[s]; ++t, ++row) {
      const double* src = x.data() + row * m;
      for (int64_t j = 0; j < m; ++j) dst[j] += src[j];
    }
    for (int64_t j = 0; j < m; ++j) dst[j] /= static_cast<double>(lengths[s]);
  }
  return out;
}

Tensor KlRows(const Tensor& p, const Tensor& q, bool* floored) {
  RequireSameShape(p, q, "KlRows");
  const int64_t n = p.rows(), m = p.cols();
  Tensor out({n});
  bool hit = false;
  for (int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int64_t j = 0; j < m; ++j) {
      const double pj = p[i * m + j];
      if (pj <= 0.0) continue;
      double qj = q[i * m + j];
      if (qj < kProbFloor) {
        qj = kProbFloor;
        hit = true;
      }
      s += pj * (std::log(pj) - std::log(qj));
    }
    out[i] = s;
  }
  if (floored) *floored = hit;
  return out;
}

}  // namespace osnip::ops
