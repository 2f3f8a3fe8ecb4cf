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

#include "osnip/diffmath/tensor.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "osnip/diffmath/errors.h"

namespace osnip {

int64_t ShapeSize(const Shape& s) {
  int64_t n = 1;
  for (int64_t e : s) {
    if (e <= 0) throw ShapeError("non-positive extent in shape " + ShapeString(s));
    n *= e;
  }
  return n;
}

std::string ShapeString(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  data_.assign(ShapeSize(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (ShapeSize(shape_) != static_cast<int64_t>(data_.size())) {
    throw ShapeError("shape " + ShapeString(shape_) + " does not match " +
                     std::to_string(data_.size()) + " elements");
  }
}

Tensor Tensor::Scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::Full(Shape shape, double v) {
  Tensor t(std::move(shape));
  for (double& x : t.data_) x = v;
  return t;
}

Tensor Tensor::Vector(std::vector<double> v) {
  const int64_t n = static_cast<int64_t>(v.size());
  return Tensor({n}, std::move(v));
}

Tensor Tensor::Matrix(int64_t rows, int64_t cols, std::vector<double> v) {
  return Tensor({rows, cols}, std::move(v));
}

int64_t Tensor::dim(int i) const {
  if (i < 0 || i >= rank()) throw ShapeError("dim index out of range");
  return shape_[i];
}

int64_t Tensor::rows() const {
  if (rank() == 2) return shape_[0];
  if (rank() == 1) return 1;
  if (rank() == 0) return 1;
  throw ShapeError("rows() on rank " + std::to_string(rank()) + " tensor");
}

int64_t Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  if (rank() == 1) return shape_[0];
  if (rank() == 0) return 1;
  throw ShapeError("cols() on rank " + std::to_string(rank()) + " tensor");
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ShapeError("item() on tensor of shape " + ShapeString(shape_));
  }
  return data_[0];
}

Tensor Tensor::Row(int64_t r) const {
  const int64_t c = cols();
  if (r < 0 || r >= rows()) throw ShapeError("row index out of range");
  return Tensor({c}, std::vector<double>(data_.begin() + r * c,
                                         data_.begin() + (r + 1) * c));
}

Tensor Tensor::Reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

bool Tensor::IsFinite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void Tensor::CheckFinite(const std::string& where) const {
  if (!IsFinite()) throw NumericError("non-finite value in " + where);
}

}  // namespace osnip
