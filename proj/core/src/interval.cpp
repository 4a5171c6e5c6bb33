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
#include "agt/interval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "agt/errors.hpp"

namespace agt {
namespace {

std::string shape_string(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " +
                         shape_string(b));
  }
}

void require_inner(const Tensor& a, const Tensor& b, const char* op) {
  if (a.cols() != b.rows()) {
    throw DimensionError(std::string(op) + ": inner dimensions differ " + shape_string(a) +
                         " x " + shape_string(b));
  }
}

}  // namespace

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw DimensionError("Tensor: " + std::to_string(values_.size()) +
                         " values for shape " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
}

Tensor Tensor::column(std::span<const double> values) {
  return Tensor(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("Tensor::from_rows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(values));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_inner(a, b, "matmul");
  Tensor out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  if (n == 1) {
    const double* x = b.values().data();
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double* arow = a.values().data() + i * a.cols();
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * x[k];
      out[i] = acc;
    }
    return out;
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* row = &out(i, 0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const double* brow = b.values().data() + k * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += aik * brow[j];
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "hadamard");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = a;
  for (double& v : out.values()) v *= c;
  return out;
}

IntervalTensor::IntervalTensor(Tensor lo, Tensor hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  require_same_shape(lo_, hi_, "IntervalTensor");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] <= hi_[i])) {
      throw std::invalid_argument("IntervalTensor: lo > hi at flat index " + std::to_string(i));
    }
  }
}

IntervalTensor IntervalTensor::point(Tensor value) {
  Tensor copy = value;
  return IntervalTensor(std::move(value), std::move(copy), Unchecked{});
}

bool IntervalTensor::contains(const Tensor& value, double tolerance) const {
  if (!value.same_shape(lo_)) return false;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value[i] < lo_[i] - tolerance || value[i] > hi_[i] + tolerance) return false;
  }
  return true;
}

bool IntervalTensor::contains(const IntervalTensor& inner, double tolerance) const {
  if (!inner.lo_.same_shape(lo_)) return false;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (inner.lo_[i] < lo_[i] - tolerance || inner.hi_[i] > hi_[i] + tolerance) return false;
  }
  return true;
}

Tensor IntervalTensor::midpoint() const {
  Tensor mid(rows(), cols());
  for (std::size_t i = 0; i < size(); ++i) mid[i] = 0.5 * (lo_[i] + hi_[i]);
  return mid;
}

Tensor IntervalTensor::width() const {
  Tensor w(rows(), cols());
  for (std::size_t i = 0; i < size(); ++i) w[i] = hi_[i] - lo_[i];
  return w;
}

IntervalTensor iadd(const IntervalTensor& a, const IntervalTensor& b) {
  require_same_shape(a.lo_, b.lo_, "iadd");
  Tensor lo = a.lo_;
  Tensor hi = a.hi_;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] += b.lo_[i];
    hi[i] += b.hi_[i];
  }
  return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
}

IntervalTensor imatmul(const IntervalTensor& a, const IntervalTensor& b) {
  require_inner(a.lo_, b.lo_, "imatmul");
  const std::size_t m = a.rows();
  const std::size_t inner = a.cols();
  const std::size_t n = b.cols();
  Tensor lo(m, n);
  Tensor hi(m, n);
  const double* bl = b.lo_.values().data();
  const double* bu = b.hi_.values().data();
  if (n == 1 && b.is_point()) {
    // Point vector: two candidate products per term.
    for (std::size_t i = 0; i < m; ++i) {
      const double* al = a.lo_.values().data() + i * inner;
      const double* au = a.hi_.values().data() + i * inner;
      double acc_lo = 0.0, acc_hi = 0.0;
      for (std::size_t k = 0; k < inner; ++k) {
        const double p1 = al[k] * bl[k];
        const double p3 = au[k] * bl[k];
        acc_lo += std::min(p1, p3);
        acc_hi += std::max(p1, p3);
      }
      lo[i] = acc_lo;
      hi[i] = acc_hi;
    }
    return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
  }
  if (n == 1) {
    // Matrix-vector: one running sum per row, same order as below.
    for (std::size_t i = 0; i < m; ++i) {
      const double* al = a.lo_.values().data() + i * inner;
      const double* au = a.hi_.values().data() + i * inner;
      double acc_lo = 0.0, acc_hi = 0.0;
      for (std::size_t k = 0; k < inner; ++k) {
        const double p1 = al[k] * bl[k];
        const double p2 = al[k] * bu[k];
        const double p3 = au[k] * bl[k];
        const double p4 = au[k] * bu[k];
        acc_lo += std::min(std::min(p1, p2), std::min(p3, p4));
        acc_hi += std::max(std::max(p1, p2), std::max(p3, p4));
      }
      lo[i] = acc_lo;
      hi[i] = acc_hi;
    }
    return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
  }
  for (std::size_t i = 0; i < m; ++i) {
    double* lo_row = &lo(i, 0);
    double* hi_row = &hi(i, 0);
    for (std::size_t k = 0; k < inner; ++k) {
      const double al = a.lo_(i, k);
      const double au = a.hi_(i, k);
      const double* bl_row = bl + k * n;
      const double* bu_row = bu + k * n;
      if (al == au) {
        // Point coefficient: the product is monotone in b.
        if (al >= 0.0) {
          for (std::size_t j = 0; j < n; ++j) {
            lo_row[j] += al * bl_row[j];
            hi_row[j] += al * bu_row[j];
          }
        } else {
          for (std::size_t j = 0; j < n; ++j) {
            lo_row[j] += al * bu_row[j];
            hi_row[j] += al * bl_row[j];
          }
        }
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double p1 = al * bl_row[j];
        const double p2 = al * bu_row[j];
        const double p3 = au * bl_row[j];
        const double p4 = au * bu_row[j];
        lo_row[j] += std::min(std::min(p1, p2), std::min(p3, p4));
        hi_row[j] += std::max(std::max(p1, p2), std::max(p3, p4));
      }
    }
  }
  return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
}

IntervalTensor imatmul_tn(const IntervalTensor& a, const IntervalTensor& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("imatmul_tn: " + shape_string(a.lo_) + "^T x " + shape_string(b.lo_));
  }
  const std::size_t inner = a.rows();
  const std::size_t m = a.cols();
  const std::size_t n = b.cols();
  Tensor lo(m, n);
  Tensor hi(m, n);
  if (n == 1) {
    double* lo_out = lo.values().data();
    double* hi_out = hi.values().data();
    for (std::size_t k = 0; k < inner; ++k) {
      const double* al = a.lo_.values().data() + k * m;
      const double* au = a.hi_.values().data() + k * m;
      const double bl = b.lo_[k], bu = b.hi_[k];
      for (std::size_t i = 0; i < m; ++i) {
        const double p1 = al[i] * bl;
        const double p2 = al[i] * bu;
        const double p3 = au[i] * bl;
        const double p4 = au[i] * bu;
        lo_out[i] += std::min(std::min(p1, p2), std::min(p3, p4));
        hi_out[i] += std::max(std::max(p1, p2), std::max(p3, p4));
      }
    }
    return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
  }
  for (std::size_t k = 0; k < inner; ++k) {
    const double* al = a.lo_.values().data() + k * m;
    const double* au = a.hi_.values().data() + k * m;
    const double* bl = b.lo_.values().data() + k * n;
    const double* bu = b.hi_.values().data() + k * n;
    for (std::size_t i = 0; i < m; ++i) {
      double* lo_row = lo.values().data() + i * n;
      double* hi_row = hi.values().data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double p1 = al[i] * bl[j];
        const double p2 = al[i] * bu[j];
        const double p3 = au[i] * bl[j];
        const double p4 = au[i] * bu[j];
        lo_row[j] += std::min(std::min(p1, p2), std::min(p3, p4));
        hi_row[j] += std::max(std::max(p1, p2), std::max(p3, p4));
      }
    }
  }
  return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
}

IntervalTensor iouter(const IntervalTensor& u, const IntervalTensor& v) {
  if (u.cols() != 1 || v.cols() != 1) {
    throw DimensionError("iouter: expects column vectors, got " + shape_string(u.lo_) + " and " +
                         shape_string(v.lo_));
  }
  const std::size_t m = u.rows();
  const std::size_t n = v.rows();
  Tensor lo(m, n);
  Tensor hi(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const double ul = u.lo_[i], uu = u.hi_[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double p1 = ul * v.lo_[j];
      const double p2 = ul * v.hi_[j];
      const double p3 = uu * v.lo_[j];
      const double p4 = uu * v.hi_[j];
      lo(i, j) = std::min(std::min(p1, p2), std::min(p3, p4));
      hi(i, j) = std::max(std::max(p1, p2), std::max(p3, p4));
    }
  }
  return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
}

IntervalTensor ihadamard(const IntervalTensor& a, const IntervalTensor& b) {
  require_same_shape(a.lo_, b.lo_, "ihadamard");
  Tensor lo(a.rows(), a.cols());
  Tensor hi(a.rows(), a.cols());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double p1 = a.lo_[i] * b.lo_[i];
    const double p2 = a.lo_[i] * b.hi_[i];
    const double p3 = a.hi_[i] * b.lo_[i];
    const double p4 = a.hi_[i] * b.hi_[i];
    lo[i] = std::min(std::min(p1, p2), std::min(p3, p4));
    hi[i] = std::max(std::max(p1, p2), std::max(p3, p4));
  }
  return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
}

IntervalTensor itranspose(const IntervalTensor& a) {
  return IntervalTensor(transpose(a.lo_), transpose(a.hi_), IntervalTensor::Unchecked{});
}

IntervalTensor iscale(const IntervalTensor& a, double c) {
  if (c >= 0.0) {
    return IntervalTensor(scale(a.lo_, c), scale(a.hi_, c), IntervalTensor::Unchecked{});
  }
  return IntervalTensor(scale(a.hi_, c), scale(a.lo_, c), IntervalTensor::Unchecked{});
}

IntervalTensor imonotone_map(const IntervalTensor& a, const std::function<double(double)>& fn) {
  Tensor lo = a.lo_;
  Tensor hi = a.hi_;
  for (double& v : lo.values()) v = fn(v);
  for (double& v : hi.values()) v = fn(v);
  return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
}

IntervalTensor iclamp(const IntervalTensor& a, double lo_bound, double hi_bound) {
  if (!(lo_bound <= hi_bound)) throw std::invalid_argument("iclamp: empty range");
  Tensor lo = a.lo_;
  Tensor hi = a.hi_;
  for (double& v : lo.values()) v = std::clamp(v, lo_bound, hi_bound);
  for (double& v : hi.values()) v = std::clamp(v, lo_bound, hi_bound);
  return IntervalTensor(std::move(lo), std::move(hi), IntervalTensor::Unchecked{});
}

}  // namespace agt
