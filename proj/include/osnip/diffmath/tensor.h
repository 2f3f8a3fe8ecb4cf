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

#ifndef OSNIP_DIFFMATH_TENSOR_H_
#define OSNIP_DIFFMATH_TENSOR_H_

#include <cstdint>
#include <string>
#include <vector>

namespace osnip {

using Shape = std::vector<int64_t>;

// Dense row-major array of doubles. Rank 0 is a scalar with one element.
class Tensor {
 public:
  Tensor() : data_(1, 0.0) {}
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Scalar(double v);
  static Tensor Full(Shape shape, double v);
  static Tensor Vector(std::vector<double> v);
  static Tensor Matrix(int64_t rows, int64_t cols, std::vector<double> v);

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  int64_t dim(int i) const;

  // Views a rank-1 tensor as a single row.
  int64_t rows() const;
  int64_t cols() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double& operator[](int64_t i) { return data_[i]; }
  double operator[](int64_t i) const { return data_[i]; }
  double& at(int64_t r, int64_t c) { return data_[r * cols() + c]; }
  double at(int64_t r, int64_t c) const { return data_[r * cols() + c]; }

  double item() const;
  Tensor Row(int64_t r) const;
  Tensor Reshaped(Shape shape) const;

  bool IsFinite() const;
  // Throws NumericError naming `where` if any entry is NaN or Inf.
  void CheckFinite(const std::string& where) const;

  bool operator==(const Tensor& o) const {
    return shape_ == o.shape_ && data_ == o.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

int64_t ShapeSize(const Shape& s);
std::string ShapeString(const Shape& s);

}  // namespace osnip

#endif  // OSNIP_DIFFMATH_TENSOR_H_
