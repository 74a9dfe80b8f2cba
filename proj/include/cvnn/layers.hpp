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

// Complex layers and their execution backends.
//
// Every complex linear map W z with W = W_r + i W_i can be executed three
// ways, all numerically equivalent:
//
//   Naive  four real products W_r x, W_i y, W_i x, W_r y recorded as separate
//          tape nodes, the way a framework that tracks real and imaginary
//          parts independently would.
//   Gauss  three real products (Gauss' multiplication trick):
//            k1 = (W_r + W_i) x,  k2 = W_r (y - x),  k3 = W_i (x + y),
//            Re = k1 - k3,  Im = k1 + k2.
//   Block  one real product with the block matrix [[W_r, -W_i], [W_i, W_r]]
//          applied to the stacked input [x; y], fused into a single tape node
//          whose backward applies the transposed block to [g_r; g_i].

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cvnn/autograd.hpp"
#include "cvnn/conv_geometry.hpp"
#include "cvnn/ctensor.hpp"

namespace cvnn {

using Rng = std::mt19937_64;

enum class Backend { Naive, Gauss, Block };

inline constexpr Backend kAllBackends[] = {Backend::Naive, Backend::Gauss, Backend::Block};

std::string_view to_string(Backend backend);
// Accepts "naive", "gauss", "block"; throws std::invalid_argument otherwise.
Backend parse_backend(std::string_view name);

// Independent zero-mean uniform Glorot draws for the real and imaginary
// planes, each scaled by 1/sqrt(2) so the complex weight matches the
// variance of a real Glorot weight.
CTensor glorot_complex(const Shape& shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);
// Real Glorot weight stored in the real plane.
CTensor glorot_real(const Shape& shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

// ---- functional forms --------------------------------------------------------

// z [..., in] times W [out, in] (+ bias [out]) -> [..., out].
Var complex_linear(Var z, Var weight, std::optional<Var> bias, Backend backend);

// Complex cross-correlation. z is [B, C, L] (one_d) or [B, C, H, W]; the
// weight has ConvGeometry::weight_shape(one_d).
Var complex_conv(Var z, Var weight, std::optional<Var> bias, const ConvGeometry& geometry,
                 bool one_d, Backend backend);

// Real-plane x [..., in] times W [out, in] (+ bias) as a single node.
Var real_linear(Var x, Var weight, std::optional<Var> bias);

double gelu(double x);
double gelu_derivative(double x);

// f applied independently to the real and imaginary planes.
CTensor split_activation(const CTensor& z, const std::function<double(double)>& f);
Var split_gelu(Var z);
Var split_leaky_relu(Var z, double slope);

// Magnitude nonlinearity f_Mag: R>=0 -> R>=0 with its derivative.
struct MagnitudeFn {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;

  static MagnitudeFn identity();
  static MagnitudeFn relu();
  static MagnitudeFn tanh();
};

// f_Mag(|z|) e^{i theta}. Throws std::domain_error when f_Mag is negative.
CTensor mag_activation(const CTensor& z, const MagnitudeFn& fn);
Var mag_activation(Var z, const MagnitudeFn& fn);

// Per-row whitening of the last axis: mu and the 2x2 covariance of (x, y)
// over features, z_norm = (Sigma + eps I)^{-1/2} (z - mu), then gamma z_norm + beta.
// gamma and beta are complex per-feature vectors.
Var complex_layernorm(Var z, Var gamma, Var beta, double eps);

// theta_q = (2 pi / levels) round(levels theta / 2 pi), rewrapped to
// (-pi, pi]; magnitude is kept. Ties round half away from zero. levels == 0 is
// the identity.
CTensor phase_quantize(const CTensor& z, int levels);
// Straight-through: quantized forward, identity backward.
Var phase_quantize(Var z, int levels);

// ---- layers ------------------------------------------------------------------

class ComplexLinear {
 public:
  ComplexLinear(std::string name, std::size_t in, std::size_t out, bool bias, Rng& rng,
                Backend backend = Backend::Block);

  Var forward(Tape& tape, Var z);
  std::vector<Parameter*> parameters();

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  Backend backend() const { return backend_; }
  void set_backend(Backend b) { backend_ = b; }

  Parameter weight;  // [out, in]; real plane W_r, imaginary plane W_i
  std::optional<Parameter> bias;

 private:
  std::size_t in_, out_;
  Backend backend_;
};

class ComplexConv1d {
 public:
  ComplexConv1d(std::string name, const ConvGeometry& geometry, bool bias, Rng& rng,
                Backend backend = Backend::Block);

  Var forward(Tape& tape, Var z);
  std::vector<Parameter*> parameters();

  const ConvGeometry& geometry() const { return geometry_; }
  Backend backend() const { return backend_; }
  void set_backend(Backend b) { backend_ = b; }

  Parameter weight;  // [out, in / groups, k]
  std::optional<Parameter> bias;

 private:
  ConvGeometry geometry_;
  Backend backend_;
};

class ComplexConv2d {
 public:
  ComplexConv2d(std::string name, const ConvGeometry& geometry, bool bias, Rng& rng,
                Backend backend = Backend::Block);

  Var forward(Tape& tape, Var z);
  std::vector<Parameter*> parameters();

  const ConvGeometry& geometry() const { return geometry_; }
  Backend backend() const { return backend_; }
  void set_backend(Backend b) { backend_ = b; }

  Parameter weight;  // [out, in / groups, kh, kw]
  std::optional<Parameter> bias;

 private:
  ConvGeometry geometry_;
  Backend backend_;
};

class ComplexLayerNorm {
 public:
  static constexpr double kDefaultEps = 1e-5;

  ComplexLayerNorm(std::string name, std::size_t features, double eps = kDefaultEps);

  Var forward(Tape& tape, Var z);
  std::vector<Parameter*> parameters() { return {&gamma, &beta}; }
  double eps() const { return eps_; }

  Parameter gamma;  // initialised to 1 + 0i
  Parameter beta;   // initialised to 0

 private:
  double eps_;
};

class PhaseQuantizer {
 public:
  explicit PhaseQuantizer(int levels);

  Var forward(Var z) const { return phase_quantize(z, levels_); }
  int levels() const { return levels_; }

 private:
  int levels_;
};

// Real-valued dense layer; parameters keep a zero imaginary plane.
class Linear {
 public:
  Linear(std::string name, std::size_t in, std::size_t out, bool bias, Rng& rng);

  Var forward(Tape& tape, Var x);
  std::vector<Parameter*> parameters();

  Parameter weight;
  std::optional<Parameter> bias;
};

namespace testing {
// Corrupts the sign of k2 in the Gauss linear path. Used only by the
// verification fault-injection tests.
void set_gauss_linear_fault(bool enabled);
}  // namespace testing

}  // namespace cvnn
