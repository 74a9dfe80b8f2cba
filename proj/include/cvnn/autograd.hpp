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

// Define-by-run reverse-mode tape over CTensor values.
//
// Gradient convention: every node carries the real pair (dL/dx, dL/dy) for
// its value z = x + iy. The conjugate Wirtinger derivative dL/dz̄ is half of
// dL/dx + i dL/dy; optimizers consume the pair directly and the factor of one
// half is absorbed into the learning rate.
//
// Real-valued intermediates are CTensors whose imaginary plane is zero. Ops
// that are documented as "real" read only the real plane and emit a zero
// imaginary gradient.

#pragma once

#include <complex>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cvnn/ctensor.hpp"

namespace cvnn {

struct GradPair {
  RTensor g_r;  // dL/dx
  RTensor g_i;  // dL/dy

  static GradPair zeros(const Shape& shape) { return {RTensor(shape), RTensor(shape)}; }
  static GradPair from(const CTensor& packed) { return {packed.real_part(), packed.imag_part()}; }

  const Shape& shape() const { return g_r.shape(); }
  GradPair& operator+=(const GradPair& other);
};

struct Parameter {
  Parameter() = default;
  Parameter(std::string name, CTensor value) : name(std::move(name)), value(std::move(value)) {}

  std::string name;
  CTensor value;
  std::optional<GradPair> grad;
};

enum class OpKind {
  Input,
  Param,
  Add,
  Sub,
  Mul,
  Scale,
  Real,
  Imag,
  Complex,
  Conj,
  Magnitude,
  SquaredMagnitude,
  Relu,
  Sum,
  Mean,
  LogClamp,
  Softplus,
  Exp,
  MatMulReal,
  LinearReal,
  ConvReal,
  BlockLinear,
  BlockConv,
  BiasAdd,
  SplitGelu,
  SplitLeakyRelu,
  MagActivation,
  StraightThrough,
  LayerNorm,
  Transpose,
  Reshape,
  Stft,
  Istft,
};

std::string_view to_string(OpKind kind);

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while its tape is alive
// and not cleared.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr && id_ >= 0; }

  const CTensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  // Called once per node during backward with the node's accumulated gradient.
  // Implementations accumulate into their inputs through grad_buffer().
  using BackwardFn = std::function<void(Tape&, const GradPair&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var input(CTensor value, bool requires_grad = false);
  Var constant(CTensor value) { return input(std::move(value), false); }

  // Leaf bound to a parameter; repeated calls with the same parameter return
  // the same node. The parameter is registered and receives a gradient on
  // every backward pass (zero when unused).
  Var param(Parameter& p);

  Var record(OpKind kind, std::vector<Var> inputs, CTensor value, BackwardFn backward);

  const CTensor& value(int id) const { return nodes_.at(id).value; }
  const CTensor& value(Var v) const { return value(v.id()); }
  bool requires_grad(int id) const { return nodes_.at(id).requires_grad; }
  OpKind kind(int id) const { return nodes_.at(id).kind; }

  // Accumulator for node `id`, zero-initialised on first access.
  GradPair& grad_buffer(int id);

  // Gradient reached at `v` by the last backward pass; zeros if none.
  GradPair grad(Var v) const;

  // Reverse sweep from a real scalar loss. Throws std::invalid_argument when
  // the loss is not a scalar or has an imaginary part above 1e-12.
  void backward(Var loss);
  // Vector-Jacobian product: reverse sweep seeded with `seed` at `output`.
  void backward(Var output, const GradPair& seed);

  // Number of recorded nodes (leaves included) for the current forward pass.
  std::size_t node_count() const { return nodes_.size(); }
  std::map<OpKind, std::size_t> histogram() const;

  const std::vector<Parameter*>& parameters() const { return params_; }

  void clear();

 private:
  struct Node {
    OpKind kind;
    std::vector<int> inputs;
    CTensor value;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
    std::optional<GradPair> grad;
  };

  void sweep();

  std::deque<Node> nodes_;
  std::vector<Parameter*> params_;
  std::unordered_map<const Parameter*, int> param_nodes_;
};

void accumulate(std::span<double> dst, std::span<const double> src);

// ---- Differentiable primitives ---------------------------------------------

// Elementwise complex arithmetic on equal shapes.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var z, double s);
Var conj(Var z);

// z -> Re z and z -> Im z, each as a real tensor (zero imaginary plane).
Var real_part(Var z);
Var imag_part(Var z);
// (a, b) -> Re a + i Re b.
Var make_complex(Var re, Var im);

// |z| and |z|^2 as real tensors. The gradient of |z| at z = 0 is taken as 0.
Var magnitude(Var z);
Var squared_magnitude(Var z);

// Real-plane ops.
Var relu(Var x);
Var softplus(Var x);
// Complex exponential e^z.
Var exp(Var z);
Var log_clamp(Var x, double floor);
// a [M x K] times b [N x K] transposed -> [M x N].
Var matmul_nt(Var a, Var b);

// Sum / mean of real and imaginary planes over every element -> scalar.
Var sum(Var z);
Var mean(Var z);

// Swaps the last two axes.
Var transpose_last2(Var z);
Var reshape(Var z, Shape shape);

// Adds a per-channel complex bias along `axis` of z.
Var add_bias(Var z, Var bias, std::size_t axis);

// Straight-through estimator: forward returns `forward_value`, backward
// passes the incoming gradient to `z` unchanged.
Var ste_identity(Var z, CTensor forward_value);

// ---- Optimisation ----------------------------------------------------------

void zero_grad(std::span<Parameter* const> params);

// (x, y) <- (x - lr * g_r, y - lr * g_i). Throws if a gradient is missing.
void sgd_step(std::span<Parameter* const> params, double lr);

// Adam over the real pair (x, y) of each complex parameter, one shared step
// counter for all parameters.
class Adam {
 public:
  struct Options {
    double lr = 2e-4;
    double beta1 = 0.8;
    double beta2 = 0.9;
    double eps = 1e-8;
  };

  Adam(std::vector<Parameter*> params, Options options);

  void step();
  void zero_grad();
  std::size_t step_count() const { return t_; }
  const Options& options() const { return options_; }
  // For schedules; takes effect on the next step().
  void set_lr(double lr);

 private:
  struct Moments {
    std::vector<double> m_re, m_im, v_re, v_im;
  };
  std::vector<Parameter*> params_;
  std::vector<Moments> state_;
  Options options_;
  std::size_t t_ = 0;
};

}  // namespace cvnn
