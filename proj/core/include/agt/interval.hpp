// Copyright 2026 The AGT Authors
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
#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace agt {

/// Dense row-major 2-D array of doubles. Vectors are n x 1 columns.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Tensor column(std::span<const double> values);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  bool same_shape(const Tensor& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);

/// Elementwise enclosure [lo, hi] of a set of tensors of one shape.
///
/// Invariants: lo and hi share a shape and lo <= hi everywhere. Arithmetic
/// is plain double precision with round-to-nearest; results are enclosures
/// up to accumulated rounding, not outward-rounded.
class IntervalTensor {
 public:
  IntervalTensor() = default;
  /// Throws DimensionError on shape mismatch and std::invalid_argument if
  /// any lo > hi (or is NaN).
  IntervalTensor(Tensor lo, Tensor hi);

  static IntervalTensor point(Tensor value);

  const Tensor& lo() const noexcept { return lo_; }
  const Tensor& hi() const noexcept { return hi_; }
  std::size_t rows() const noexcept { return lo_.rows(); }
  std::size_t cols() const noexcept { return lo_.cols(); }
  std::size_t size() const noexcept { return lo_.size(); }

  bool is_point() const noexcept { return lo_ == hi_; }
  bool contains(const Tensor& value, double tolerance = 0.0) const;
  bool contains(const IntervalTensor& inner, double tolerance = 0.0) const;
  Tensor midpoint() const;
  Tensor width() const;

 private:
  struct Unchecked {};
  IntervalTensor(Tensor lo, Tensor hi, Unchecked) : lo_(std::move(lo)), hi_(std::move(hi)) {}

  friend IntervalTensor iadd(const IntervalTensor&, const IntervalTensor&);
  friend IntervalTensor imatmul(const IntervalTensor&, const IntervalTensor&);
  friend IntervalTensor imatmul_tn(const IntervalTensor&, const IntervalTensor&);
  friend IntervalTensor iouter(const IntervalTensor&, const IntervalTensor&);
  friend IntervalTensor ihadamard(const IntervalTensor&, const IntervalTensor&);
  friend IntervalTensor itranspose(const IntervalTensor&);
  friend IntervalTensor iscale(const IntervalTensor&, double);
  friend IntervalTensor imonotone_map(const IntervalTensor&, const std::function<double(double)>&);
  friend IntervalTensor iclamp(const IntervalTensor&, double, double);

  Tensor lo_;
  Tensor hi_;
};

IntervalTensor iadd(const IntervalTensor& a, const IntervalTensor& b);

/// Tightest elementwise enclosure of {A x B}: each output entry is the sum
/// over the inner index of exact scalar interval products (min/max of the
/// four endpoint products).
IntervalTensor imatmul(const IntervalTensor& a, const IntervalTensor& b);

/// imatmul(itranspose(a), b) without forming the transpose; same summation
/// order, so the results agree bit for bit.
IntervalTensor imatmul_tn(const IntervalTensor& a, const IntervalTensor& b);

/// Enclosure of u v^T for column vectors u and v.
IntervalTensor iouter(const IntervalTensor& u, const IntervalTensor& v);

IntervalTensor ihadamard(const IntervalTensor& a, const IntervalTensor& b);
IntervalTensor itranspose(const IntervalTensor& a);

/// Multiplication by a scalar; bounds swap when c < 0.
IntervalTensor iscale(const IntervalTensor& a, double c);

/// Applies a non-decreasing fn to both bounds.
IntervalTensor imonotone_map(const IntervalTensor& a, const std::function<double(double)>& fn);

/// Clamps both bounds into [lo, hi]; requires lo <= hi.
IntervalTensor iclamp(const IntervalTensor& a, double lo, double hi);

}  // namespace agt
