// Copyright 2026 The Concet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONCET_TENSOR_HPP_
#define CONCET_TENSOR_HPP_

#include <cstddef>
#include <vector>

#include "concet/error.hpp"

namespace concet {

// Dense row-major tensor of doubles.  Rank 1 or 2 covers everything the
// model needs; rank-2 tensors are (rows, cols).
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(size_t n) : rows_(n), cols_(1), rank_(1), data_(n, 0.0) {}

  Tensor(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), rank_(2), data_(rows * cols, 0.0) {}

  static Tensor vector(std::vector<double> v) {
    Tensor t;
    t.rows_ = v.size();
    t.cols_ = 1;
    t.rank_ = 1;
    t.data_ = std::move(v);
    return t;
  }

  static Tensor matrix(size_t rows, size_t cols, std::vector<double> v) {
    if (v.size() != rows * cols)
      throw ShapeError("matrix init size mismatch");
    Tensor t;
    t.rows_ = rows;
    t.cols_ = cols;
    t.rank_ = 2;
    t.data_ = std::move(v);
    return t;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  int rank() const { return rank_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  double& at(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double at(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  void fill(double v) {
    for (auto& x : data_) x = v;
  }

  bool same_shape(const Tensor& o) const {
    return rank_ == o.rank_ && rows_ == o.rows_ && cols_ == o.cols_;
  }

  Tensor& operator+=(const Tensor& o) {
    if (!same_shape(o)) throw ShapeError("tensor += shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  const std::vector<double>& raw() const { return data_; }
  std::vector<double>& raw() { return data_; }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  int rank_ = 0;
  std::vector<double> data_;
};

}  // namespace concet

#endif  // CONCET_TENSOR_HPP_
