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

// Dense complex and real tensors.
//
// CTensor stores split planes: one contiguous array of real parts and one of
// imaginary parts, both row-major over the same Shape. The block-matrix
// kernels stack these planes directly, so nothing in the library ever
// interleaves them.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cvnn {

class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<std::size_t> dims) : dims_(dims) {}
  explicit Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {}

  std::size_t rank() const { return dims_.size(); }
  std::size_t operator[](std::size_t axis) const { return dims_.at(axis); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  // Product of extents; 1 for a scalar (rank 0).
  std::size_t numel() const;

  bool operator==(const Shape& other) const = default;
  std::string str() const;

 private:
  std::vector<std::size_t> dims_;
};

class RTensor {
 public:
  RTensor() = default;
  explicit RTensor(Shape shape);
  RTensor(Shape shape, std::vector<double> data);

  static RTensor filled(Shape shape, double value);
  static RTensor scalar(double value) { return RTensor(Shape{}, {value}); }

  const Shape& shape() const { return shape_; }
  std::size_t numel() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  RTensor reshaped(Shape shape) const;
  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

class CTensor {
 public:
  CTensor() = default;
  // Zero-initialised tensor of the given shape.
  explicit CTensor(Shape shape);
  CTensor(Shape shape, std::vector<double> real, std::vector<double> imag);

  static CTensor from_real(const RTensor& real);
  static CTensor from_values(Shape shape,
                             const std::vector<std::complex<double>>& values);
  static CTensor scalar(std::complex<double> v) {
    return CTensor(Shape{}, {v.real()}, {v.imag()});
  }

  const Shape& shape() const { return shape_; }
  std::size_t numel() const { return re_.size(); }

  std::span<const double> real() const { return re_; }
  std::span<const double> imag() const { return im_; }
  std::span<double> real() { return re_; }
  std::span<double> imag() { return im_; }

  std::complex<double> at(std::size_t i) const { return {re_[i], im_[i]}; }
  void set(std::size_t i, std::complex<double> v) {
    re_[i] = v.real();
    im_[i] = v.imag();
  }

  RTensor real_part() const { return RTensor(shape_, re_); }
  RTensor imag_part() const { return RTensor(shape_, im_); }

  CTensor reshaped(Shape shape) const;
  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<double> re_;
  std::vector<double> im_;
};

struct Polar {
  RTensor magnitude;
  RTensor phase;
};

// Principal phase in (-pi, pi]; the phase of 0 is 0.
double principal_phase(double re, double im);

Polar polar_decompose(const CTensor& z);

// Throws std::invalid_argument on a negative magnitude or shape mismatch.
CTensor polar_compose(const RTensor& magnitude, const RTensor& phase);

// Elementwise arithmetic with numpy-style broadcasting.
CTensor cadd(const CTensor& a, const CTensor& b);
CTensor csub(const CTensor& a, const CTensor& b);
CTensor cmul(const CTensor& a, const CTensor& b);
CTensor conj(const CTensor& z);
CTensor scale(const CTensor& z, double s);

// Shape resulting from broadcasting a against b; throws if incompatible.
Shape broadcast_shapes(const Shape& a, const Shape& b);

// Reference complex matrix-vector product W z computed from four independent
// real products (W_r x - W_i y, W_i x + W_r y). Used as ground truth for all
// execution backends.
CTensor matmul_oracle(const CTensor& w, const CTensor& z);

double max_abs_diff(const CTensor& a, const CTensor& b);
double max_abs_diff(const RTensor& a, const RTensor& b);

}  // namespace cvnn
