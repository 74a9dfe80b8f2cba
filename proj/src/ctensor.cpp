// Copyright 2026 The cvnn Authors
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

#include "cvnn/ctensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cvnn {

std::size_t Shape::numel() const {
  std::size_t n = 1;
  for (std::size_t d : dims_) n *= d;
  return n;
}

std::string Shape::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << ", ";
    os << dims_[i];
  }
  os << ']';
  return os.str();
}

RTensor::RTensor(Shape shape) : shape_(std::move(shape)), data_(shape_.numel(), 0.0) {}

RTensor::RTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_.numel()) {
    throw std::invalid_argument("RTensor: data length " + std::to_string(data_.size()) +
                                " does not match shape " + shape_.str());
  }
}

RTensor RTensor::filled(Shape shape, double value) {
  RTensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

RTensor RTensor::reshaped(Shape shape) const {
  if (shape.numel() != numel()) {
    throw std::invalid_argument("RTensor::reshaped: cannot view " + shape_.str() + " as " +
                                shape.str());
  }
  return RTensor(std::move(shape), data_);
}

bool RTensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

CTensor::CTensor(Shape shape)
    : shape_(std::move(shape)), re_(shape_.numel(), 0.0), im_(shape_.numel(), 0.0) {}

CTensor::CTensor(Shape shape, std::vector<double> real, std::vector<double> imag)
    : shape_(std::move(shape)), re_(std::move(real)), im_(std::move(imag)) {
  if (re_.size() != shape_.numel() || im_.size() != shape_.numel()) {
    throw std::invalid_argument("CTensor: plane lengths do not match shape " + shape_.str());
  }
}

CTensor CTensor::from_real(const RTensor& real) {
  std::vector<double> re(real.data().begin(), real.data().end());
  return CTensor(real.shape(), std::move(re), std::vector<double>(real.numel(), 0.0));
}

CTensor CTensor::from_values(Shape shape, const std::vector<std::complex<double>>& values) {
  CTensor t(std::move(shape));
  if (values.size() != t.numel()) {
    throw std::invalid_argument("CTensor::from_values: value count does not match shape");
  }
  for (std::size_t i = 0; i < values.size(); ++i) t.set(i, values[i]);
  return t;
}

CTensor CTensor::reshaped(Shape shape) const {
  if (shape.numel() != numel()) {
    throw std::invalid_argument("CTensor::reshaped: cannot view " + shape_.str() + " as " +
                                shape.str());
  }
  return CTensor(std::move(shape), re_, im_);
}

bool CTensor::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(re_.begin(), re_.end(), finite) &&
         std::all_of(im_.begin(), im_.end(), finite);
}

double principal_phase(double re, double im) {
  if (re == 0.0 && im == 0.0) return 0.0;
  double theta = std::atan2(im, re);
  // atan2(-0.0, negative) yields -pi; the principal range excludes it.
  if (theta <= -std::numbers::pi) theta = std::numbers::pi;
  return theta;
}

Polar polar_decompose(const CTensor& z) {
  Polar out{RTensor(z.shape()), RTensor(z.shape())};
  auto re = z.real();
  auto im = z.imag();
  for (std::size_t k = 0; k < z.numel(); ++k) {
    out.magnitude[k] = std::hypot(re[k], im[k]);
    out.phase[k] = principal_phase(re[k], im[k]);
  }
  return out;
}

CTensor polar_compose(const RTensor& magnitude, const RTensor& phase) {
  if (!(magnitude.shape() == phase.shape())) {
    throw std::invalid_argument("polar_compose: magnitude " + magnitude.shape().str() +
                                " and phase " + phase.shape().str() + " differ");
  }
  CTensor out(magnitude.shape());
  for (std::size_t k = 0; k < magnitude.numel(); ++k) {
    const double r = magnitude[k];
    if (!(r >= 0.0)) {
      throw std::invalid_argument("polar_compose: invalid magnitude " + std::to_string(r) +
                                  " at index " + std::to_string(k));
    }
    out.real()[k] = r * std::cos(phase[k]);
    out.imag()[k] = r * std::sin(phase[k]);
  }
  return out;
}

Shape broadcast_shapes(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.rank(), b.rank());
  std::vector<std::size_t> dims(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t da = i < rank - a.rank() ? 1 : a[i - (rank - a.rank())];
    const std::size_t db = i < rank - b.rank() ? 1 : b[i - (rank - b.rank())];
    if (da != db && da != 1 && db != 1) {
      throw std::invalid_argument("incompatible shapes for broadcasting: " + a.str() + " and " +
                                  b.str());
    }
    dims[i] = da == 1 ? db : da;
  }
  return Shape(std::move(dims));
}

namespace {

// Row-major strides of `s` aligned to `rank` trailing axes, zero on broadcast axes.
std::vector<std::size_t> broadcast_strides(const Shape& s, const Shape& out) {
  const std::size_t rank = out.rank();
  std::vector<std::size_t> strides(rank, 0);
  std::size_t stride = 1;
  for (std::size_t i = 0; i < s.rank(); ++i) {
    const std::size_t axis = s.rank() - 1 - i;
    const std::size_t out_axis = rank - 1 - i;
    strides[out_axis] = s[axis] == 1 ? 0 : stride;
    stride *= s[axis];
  }
  return strides;
}

template <typename Fn>
CTensor broadcast_binary(const CTensor& a, const CTensor& b, Fn fn) {
  if (a.shape() == b.shape()) {
    CTensor out(a.shape());
    for (std::size_t k = 0; k < a.numel(); ++k) out.set(k, fn(a.at(k), b.at(k)));
    return out;
  }
  const Shape shape = broadcast_shapes(a.shape(), b.shape());
  const auto sa = broadcast_strides(a.shape(), shape);
  const auto sb = broadcast_strides(b.shape(), shape);
  CTensor out(shape);
  std::vector<std::size_t> index(shape.rank(), 0);
  for (std::size_t k = 0; k < out.numel(); ++k) {
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (std::size_t d = 0; d < shape.rank(); ++d) {
      ia += index[d] * sa[d];
      ib += index[d] * sb[d];
    }
    out.set(k, fn(a.at(ia), b.at(ib)));
    for (std::size_t d = shape.rank(); d-- > 0;) {
      if (++index[d] < shape[d]) break;
      index[d] = 0;
    }
  }
  return out;
}

}  // namespace

CTensor cadd(const CTensor& a, const CTensor& b) {
  return broadcast_binary(a, b, [](auto x, auto y) { return x + y; });
}

CTensor csub(const CTensor& a, const CTensor& b) {
  return broadcast_binary(a, b, [](auto x, auto y) { return x - y; });
}

CTensor cmul(const CTensor& a, const CTensor& b) {
  // Written out so that the product uses exactly (ac - bd) + i(ad + bc).
  return broadcast_binary(a, b, [](std::complex<double> x, std::complex<double> y) {
    return std::complex<double>(x.real() * y.real() - x.imag() * y.imag(),
                                x.real() * y.imag() + x.imag() * y.real());
  });
}

CTensor conj(const CTensor& z) {
  CTensor out = z;
  for (double& v : out.imag()) v = -v;
  return out;
}

CTensor scale(const CTensor& z, double s) {
  CTensor out = z;
  for (double& v : out.real()) v *= s;
  for (double& v : out.imag()) v *= s;
  return out;
}

CTensor matmul_oracle(const CTensor& w, const CTensor& z) {
  if (w.shape().rank() != 2 || z.shape().rank() != 1 || w.shape()[1] != z.shape()[0]) {
    throw std::invalid_argument("matmul_oracle: cannot multiply " + w.shape().str() + " by " +
                                z.shape().str());
  }
  const std::size_t m = w.shape()[0];
  const std::size_t n = w.shape()[1];
  auto product = [&](std::span<const double> mat, std::span<const double> vec) {
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += mat[i * n + j] * vec[j];
      out[i] = acc;
    }
    return out;
  };
  const auto rx = product(w.real(), z.real());
  const auto iy = product(w.imag(), z.imag());
  const auto ix = product(w.imag(), z.real());
  const auto ry = product(w.real(), z.imag());
  CTensor out(Shape{m});
  for (std::size_t i = 0; i < m; ++i) {
    out.real()[i] = rx[i] - iy[i];
    out.imag()[i] = ix[i] + ry[i];
  }
  return out;
}

double max_abs_diff(const CTensor& a, const CTensor& b) {
  if (!(a.shape() == b.shape())) {
    throw std::invalid_argument("max_abs_diff: shapes " + a.shape().str() + " and " +
                                b.shape().str() + " differ");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.numel(); ++k) {
    m = std::max(m, std::abs(a.real()[k] - b.real()[k]));
    m = std::max(m, std::abs(a.imag()[k] - b.imag()[k]));
  }
  return m;
}

double max_abs_diff(const RTensor& a, const RTensor& b) {
  if (!(a.shape() == b.shape())) {
    throw std::invalid_argument("max_abs_diff: shapes " + a.shape().str() + " and " +
                                b.shape().str() + " differ");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.numel(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace cvnn
