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

#include "cvnn/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "kernels.hpp"

namespace cvnn {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::Input: return "input";
    case OpKind::Param: return "param";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Scale: return "scale";
    case OpKind::Real: return "real";
    case OpKind::Imag: return "imag";
    case OpKind::Complex: return "complex";
    case OpKind::Conj: return "conj";
    case OpKind::Magnitude: return "magnitude";
    case OpKind::SquaredMagnitude: return "squared_magnitude";
    case OpKind::Relu: return "relu";
    case OpKind::Sum: return "sum";
    case OpKind::Mean: return "mean";
    case OpKind::LogClamp: return "log_clamp";
    case OpKind::Softplus: return "softplus";
    case OpKind::Exp: return "exp";
    case OpKind::MatMulReal: return "matmul_real";
    case OpKind::LinearReal: return "linear_real";
    case OpKind::ConvReal: return "conv_real";
    case OpKind::BlockLinear: return "block_linear";
    case OpKind::BlockConv: return "block_conv";
    case OpKind::BiasAdd: return "bias_add";
    case OpKind::SplitGelu: return "split_gelu";
    case OpKind::SplitLeakyRelu: return "split_leaky_relu";
    case OpKind::MagActivation: return "mag_activation";
    case OpKind::StraightThrough: return "straight_through";
    case OpKind::LayerNorm: return "layer_norm";
    case OpKind::Transpose: return "transpose";
    case OpKind::Reshape: return "reshape";
    case OpKind::Stft: return "stft";
    case OpKind::Istft: return "istft";
  }
  return "unknown";
}

void accumulate(std::span<double> dst, std::span<const double> src) {
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
}

GradPair& GradPair::operator+=(const GradPair& other) {
  if (!(shape() == other.shape())) {
    throw std::invalid_argument("GradPair: cannot accumulate " + other.shape().str() +
                                " into " + shape().str());
  }
  accumulate(g_r.data(), other.g_r.data());
  accumulate(g_i.data(), other.g_i.data());
  return *this;
}

const CTensor& Var::value() const { return tape_->value(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::input(CTensor value, bool requires_grad) {
  Node node{OpKind::Input, {}, std::move(value), requires_grad, {}, nullptr, std::nullopt};
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  Node node{OpKind::Param, {}, p.value, true, {}, &p, std::nullopt};
  nodes_.push_back(std::move(node));
  const int id = static_cast<int>(nodes_.size() - 1);
  param_nodes_.emplace(&p, id);
  params_.push_back(&p);
  return Var(this, id);
}

Var Tape::record(OpKind kind, std::vector<Var> inputs, CTensor value, BackwardFn backward) {
  Node node;
  node.kind = kind;
  node.value = std::move(value);
  for (const Var& v : inputs) {
    if (v.tape_ != this) throw std::invalid_argument("Tape::record: input from another tape");
    node.inputs.push_back(v.id_);
    node.requires_grad = node.requires_grad || requires_grad(v.id_);
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

GradPair& Tape::grad_buffer(int id) {
  Node& node = nodes_.at(id);
  if (!node.grad) node.grad = GradPair::zeros(node.value.shape());
  return *node.grad;
}

GradPair Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.id());
  if (node.grad) return *node.grad;
  return GradPair::zeros(node.value.shape());
}

void Tape::backward(Var loss) {
  const CTensor& value = this->value(loss);
  if (value.numel() != 1) {
    throw std::invalid_argument("Tape::backward: loss must be a scalar, got shape " +
                                value.shape().str());
  }
  if (std::abs(value.imag()[0]) > 1e-12) {
    throw std::invalid_argument("Tape::backward: loss has imaginary part " +
                                std::to_string(value.imag()[0]));
  }
  GradPair seed = GradPair::zeros(value.shape());
  seed.g_r[0] = 1.0;
  backward(loss, seed);
}

void Tape::backward(Var output, const GradPair& seed) {
  if (!(seed.shape() == value(output).shape())) {
    throw std::invalid_argument("Tape::backward: seed shape " + seed.shape().str() +
                                " does not match output " + value(output).shape().str());
  }
  for (Node& node : nodes_) node.grad.reset();
  grad_buffer(output.id()) += seed;
  sweep();
}

void Tape::sweep() {
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.grad || !node.backward) continue;
    node.backward(*this, *node.grad);
  }
  for (Parameter* p : params_) {
    const Node& node = nodes_[param_nodes_.at(p)];
    if (!p->grad) p->grad = GradPair::zeros(p->value.shape());
    if (node.grad) *p->grad += *node.grad;
  }
}

std::map<OpKind, std::size_t> Tape::histogram() const {
  std::map<OpKind, std::size_t> h;
  for (const Node& node : nodes_) ++h[node.kind];
  return h;
}

void Tape::clear() {
  nodes_.clear();
  params_.clear();
  param_nodes_.clear();
}

// ---- primitives -------------------------------------------------------------

namespace {

void require_same_shape(Var a, Var b, const char* op) {
  if (!(a.shape() == b.shape())) {
    throw std::invalid_argument(std::string(op) + ": shapes " + a.shape().str() + " and " +
                                b.shape().str() + " differ");
  }
}

void require_same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw std::invalid_argument("operands live on different tapes");
}

CTensor real_only(RTensor re) { return CTensor::from_real(re); }

}  // namespace

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "add");
  const int ia = a.id(), ib = b.id();
  return a.tape().record(OpKind::Add, {a, b}, cadd(a.value(), b.value()),
                         [ia, ib](Tape& t, const GradPair& g) {
                           if (t.requires_grad(ia)) t.grad_buffer(ia) += g;
                           if (t.requires_grad(ib)) t.grad_buffer(ib) += g;
                         });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "sub");
  const int ia = a.id(), ib = b.id();
  return a.tape().record(OpKind::Sub, {a, b}, csub(a.value(), b.value()),
                         [ia, ib](Tape& t, const GradPair& g) {
                           if (t.requires_grad(ia)) t.grad_buffer(ia) += g;
                           if (t.requires_grad(ib)) {
                             GradPair& gb = t.grad_buffer(ib);
                             for (std::size_t k = 0; k < g.g_r.numel(); ++k) {
                               gb.g_r[k] -= g.g_r[k];
                               gb.g_i[k] -= g.g_i[k];
                             }
                           }
                         });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "mul");
  const int ia = a.id(), ib = b.id();
  // For out = a b: (dL/dx_a, dL/dy_a) = conj(b) (g_r + i g_i), likewise for b.
  return a.tape().record(OpKind::Mul, {a, b}, cmul(a.value(), b.value()),
                         [ia, ib](Tape& t, const GradPair& g) {
                           auto pull = [&](int self, int other) {
                             if (!t.requires_grad(self)) return;
                             const CTensor& o = t.value(other);
                             GradPair& gs = t.grad_buffer(self);
                             for (std::size_t k = 0; k < o.numel(); ++k) {
                               const double orr = o.real()[k], oi = o.imag()[k];
                               gs.g_r[k] += orr * g.g_r[k] + oi * g.g_i[k];
                               gs.g_i[k] += -oi * g.g_r[k] + orr * g.g_i[k];
                             }
                           };
                           pull(ia, ib);
                           pull(ib, ia);
                         });
}

Var scale(Var z, double s) {
  const int iz = z.id();
  return z.tape().record(OpKind::Scale, {z}, scale(z.value(), s),
                         [iz, s](Tape& t, const GradPair& g) {
                           GradPair& gz = t.grad_buffer(iz);
                           for (std::size_t k = 0; k < g.g_r.numel(); ++k) {
                             gz.g_r[k] += s * g.g_r[k];
                             gz.g_i[k] += s * g.g_i[k];
                           }
                         });
}

Var conj(Var z) {
  const int iz = z.id();
  return z.tape().record(OpKind::Conj, {z}, conj(z.value()), [iz](Tape& t, const GradPair& g) {
    GradPair& gz = t.grad_buffer(iz);
    accumulate(gz.g_r.data(), g.g_r.data());
    for (std::size_t k = 0; k < g.g_i.numel(); ++k) gz.g_i[k] -= g.g_i[k];
  });
}

Var real_part(Var z) {
  const int iz = z.id();
  return z.tape().record(OpKind::Real, {z}, real_only(z.value().real_part()),
                         [iz](Tape& t, const GradPair& g) {
                           accumulate(t.grad_buffer(iz).g_r.data(), g.g_r.data());
                         });
}

Var imag_part(Var z) {
  const int iz = z.id();
  return z.tape().record(OpKind::Imag, {z}, real_only(z.value().imag_part()),
                         [iz](Tape& t, const GradPair& g) {
                           accumulate(t.grad_buffer(iz).g_i.data(), g.g_r.data());
                         });
}

Var make_complex(Var re, Var im) {
  require_same_tape(re, im);
  require_same_shape(re, im, "make_complex");
  const int ir = re.id(), ii = im.id();
  CTensor value(re.shape(), std::vector<double>(re.value().real().begin(), re.value().real().end()),
                std::vector<double>(im.value().real().begin(), im.value().real().end()));
  return re.tape().record(OpKind::Complex, {re, im}, std::move(value),
                          [ir, ii](Tape& t, const GradPair& g) {
                            if (t.requires_grad(ir))
                              accumulate(t.grad_buffer(ir).g_r.data(), g.g_r.data());
                            if (t.requires_grad(ii))
                              accumulate(t.grad_buffer(ii).g_r.data(), g.g_i.data());
                          });
}

Var magnitude(Var z) {
  const int iz = z.id();
  const CTensor& v = z.value();
  RTensor r(v.shape());
  for (std::size_t k = 0; k < v.numel(); ++k) r[k] = std::hypot(v.real()[k], v.imag()[k]);
  CTensor value = real_only(std::move(r));
  return z.tape().record(OpKind::Magnitude, {z}, std::move(value),
                         [iz](Tape& t, const GradPair& g) {
                           const CTensor& in = t.value(iz);
                           GradPair& gz = t.grad_buffer(iz);
                           for (std::size_t k = 0; k < in.numel(); ++k) {
                             const double x = in.real()[k], y = in.imag()[k];
                             const double r = std::hypot(x, y);
                             if (r == 0.0) continue;
                             gz.g_r[k] += g.g_r[k] * x / r;
                             gz.g_i[k] += g.g_r[k] * y / r;
                           }
                         });
}

Var squared_magnitude(Var z) {
  const int iz = z.id();
  const CTensor& v = z.value();
  RTensor r(v.shape());
  for (std::size_t k = 0; k < v.numel(); ++k) {
    r[k] = v.real()[k] * v.real()[k] + v.imag()[k] * v.imag()[k];
  }
  return z.tape().record(OpKind::SquaredMagnitude, {z}, real_only(std::move(r)),
                         [iz](Tape& t, const GradPair& g) {
                           const CTensor& in = t.value(iz);
                           GradPair& gz = t.grad_buffer(iz);
                           for (std::size_t k = 0; k < in.numel(); ++k) {
                             gz.g_r[k] += 2.0 * in.real()[k] * g.g_r[k];
                             gz.g_i[k] += 2.0 * in.imag()[k] * g.g_r[k];
                           }
                         });
}

Var relu(Var x) {
  const int ix = x.id();
  RTensor r = x.value().real_part();
  for (double& v : r.data()) v = std::max(v, 0.0);
  return x.tape().record(OpKind::Relu, {x}, real_only(std::move(r)),
                         [ix](Tape& t, const GradPair& g) {
                           const CTensor& in = t.value(ix);
                           GradPair& gx = t.grad_buffer(ix);
                           for (std::size_t k = 0; k < in.numel(); ++k) {
                             if (in.real()[k] > 0.0) gx.g_r[k] += g.g_r[k];
                           }
                         });
}

Var softplus(Var x) {
  const int ix = x.id();
  RTensor r = x.value().real_part();
  for (double& v : r.data()) v = std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
  return x.tape().record(OpKind::Softplus, {x}, real_only(std::move(r)),
                         [ix](Tape& t, const GradPair& g) {
                           const CTensor& in = t.value(ix);
                           GradPair& gx = t.grad_buffer(ix);
                           for (std::size_t k = 0; k < in.numel(); ++k) {
                             const double v = in.real()[k];
                             const double sig = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                                                         : std::exp(v) / (1.0 + std::exp(v));
                             gx.g_r[k] += g.g_r[k] * sig;
                           }
                         });
}

Var exp(Var z) {
  const int iz = z.id();
  const CTensor& in = z.value();
  CTensor out(in.shape());
  for (std::size_t k = 0; k < in.numel(); ++k) {
    out.set(k, std::exp(std::complex<double>(in.real()[k], in.imag()[k])));
  }
  return z.tape().record(OpKind::Exp, {z}, std::move(out), [iz](Tape& t, const GradPair& g) {
    // Holomorphic: with w = u + iv = e^z, du/dx = u, dv/dx = v, du/dy = -v, dv/dy = u.
    const CTensor& in = t.value(iz);
    GradPair& gz = t.grad_buffer(iz);
    for (std::size_t k = 0; k < in.numel(); ++k) {
      const std::complex<double> w = std::exp(std::complex<double>(in.real()[k], in.imag()[k]));
      gz.g_r[k] += g.g_r[k] * w.real() + g.g_i[k] * w.imag();
      gz.g_i[k] += g.g_i[k] * w.real() - g.g_r[k] * w.imag();
    }
  });
}

Var log_clamp(Var x, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("log_clamp: floor must be positive");
  const int ix = x.id();
  RTensor r = x.value().real_part();
  for (double& v : r.data()) v = std::log(std::max(v, floor));
  return x.tape().record(OpKind::LogClamp, {x}, real_only(std::move(r)),
                         [ix, floor](Tape& t, const GradPair& g) {
                           const CTensor& in = t.value(ix);
                           GradPair& gx = t.grad_buffer(ix);
                           for (std::size_t k = 0; k < in.numel(); ++k) {
                             const double v = in.real()[k];
                             if (v > floor) gx.g_r[k] += g.g_r[k] / v;
                           }
                         });
}

Var matmul_nt(Var a, Var b) {
  require_same_tape(a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.rank() != 2 || sb.rank() != 2 || sa[1] != sb[1]) {
    throw std::invalid_argument("matmul_nt: cannot multiply " + sa.str() + " by transpose of " +
                                sb.str());
  }
  const std::size_t m = sa[0], k = sa[1], n = sb[0];
  RTensor out(Shape{m, n});
  kernels::view(out.data(), m, n).noalias() =
      kernels::view(a.value().real(), m, k) * kernels::view(b.value().real(), n, k).transpose();
  const int ia = a.id(), ib = b.id();
  return a.tape().record(
      OpKind::MatMulReal, {a, b}, real_only(std::move(out)),
      [ia, ib, m, k, n](Tape& t, const GradPair& g) {
        const auto gy = kernels::view(g.g_r.data(), m, n);
        if (t.requires_grad(ia)) {
          kernels::view(t.grad_buffer(ia).g_r.data(), m, k).noalias() +=
              gy * kernels::view(t.value(ib).real(), n, k);
        }
        if (t.requires_grad(ib)) {
          kernels::view(t.grad_buffer(ib).g_r.data(), n, k).noalias() +=
              gy.transpose() * kernels::view(t.value(ia).real(), m, k);
        }
      });
}

Var sum(Var z) {
  const CTensor& v = z.value();
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < v.numel(); ++k) {
    re += v.real()[k];
    im += v.imag()[k];
  }
  const int iz = z.id();
  return z.tape().record(OpKind::Sum, {z}, CTensor::scalar({re, im}),
                         [iz](Tape& t, const GradPair& g) {
                           GradPair& gz = t.grad_buffer(iz);
                           for (double& x : gz.g_r.data()) x += g.g_r[0];
                           for (double& x : gz.g_i.data()) x += g.g_i[0];
                         });
}

Var mean(Var z) {
  const CTensor& v = z.value();
  if (v.numel() == 0) throw std::invalid_argument("mean: empty tensor");
  const double n = static_cast<double>(v.numel());
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < v.numel(); ++k) {
    re += v.real()[k];
    im += v.imag()[k];
  }
  const int iz = z.id();
  return z.tape().record(OpKind::Mean, {z}, CTensor::scalar({re / n, im / n}),
                         [iz, n](Tape& t, const GradPair& g) {
                           GradPair& gz = t.grad_buffer(iz);
                           for (double& x : gz.g_r.data()) x += g.g_r[0] / n;
                           for (double& x : gz.g_i.data()) x += g.g_i[0] / n;
                         });
}

Var transpose_last2(Var z) {
  const Shape& s = z.shape();
  if (s.rank() < 2) throw std::invalid_argument("transpose_last2: rank must be at least 2");
  const std::size_t rows = s[s.rank() - 2], cols = s[s.rank() - 1];
  const std::size_t outer = s.numel() / (rows * cols);
  std::vector<std::size_t> dims = s.dims();
  std::swap(dims[dims.size() - 1], dims[dims.size() - 2]);
  auto permute = [rows, cols, outer](std::span<const double> src, std::span<double> dst,
                                     bool forward) {
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * rows * cols;
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          if (forward) {
            dst[base + c * rows + r] = src[base + r * cols + c];
          } else {
            dst[base + r * cols + c] += src[base + c * rows + r];
          }
        }
      }
    }
  };
  CTensor out{Shape(dims)};
  permute(z.value().real(), out.real(), true);
  permute(z.value().imag(), out.imag(), true);
  const int iz = z.id();
  return z.tape().record(OpKind::Transpose, {z}, std::move(out),
                         [iz, permute](Tape& t, const GradPair& g) {
                           GradPair& gz = t.grad_buffer(iz);
                           permute(g.g_r.data(), gz.g_r.data(), false);
                           permute(g.g_i.data(), gz.g_i.data(), false);
                         });
}

Var reshape(Var z, Shape shape) {
  CTensor out = z.value().reshaped(std::move(shape));
  const int iz = z.id();
  return z.tape().record(OpKind::Reshape, {z}, std::move(out), [iz](Tape& t, const GradPair& g) {
    GradPair& gz = t.grad_buffer(iz);
    accumulate(gz.g_r.data(), g.g_r.data());
    accumulate(gz.g_i.data(), g.g_i.data());
  });
}

Var add_bias(Var z, Var bias, std::size_t axis) {
  require_same_tape(z, bias);
  const Shape& s = z.shape();
  if (axis >= s.rank() || bias.shape().rank() != 1 || bias.shape()[0] != s[axis]) {
    throw std::invalid_argument("add_bias: bias " + bias.shape().str() +
                                " does not match axis " + std::to_string(axis) + " of " +
                                s.str());
  }
  const std::size_t channels = s[axis];
  std::size_t inner = 1;
  for (std::size_t d = axis + 1; d < s.rank(); ++d) inner *= s[d];
  const std::size_t outer = s.numel() / (channels * inner);
  CTensor out = z.value();
  const CTensor& b = bias.value();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t c = 0; c < channels; ++c) {
      double* re = out.real().data() + (o * channels + c) * inner;
      double* im = out.imag().data() + (o * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        re[i] += b.real()[c];
        im[i] += b.imag()[c];
      }
    }
  }
  const int iz = z.id(), ib = bias.id();
  return z.tape().record(OpKind::BiasAdd, {z, bias}, std::move(out),
                         [iz, ib, outer, channels, inner](Tape& t, const GradPair& g) {
                           if (t.requires_grad(iz)) t.grad_buffer(iz) += g;
                           if (!t.requires_grad(ib)) return;
                           GradPair& gb = t.grad_buffer(ib);
                           for (std::size_t o = 0; o < outer; ++o) {
                             for (std::size_t c = 0; c < channels; ++c) {
                               const std::size_t base = (o * channels + c) * inner;
                               double sr = 0.0, si = 0.0;
                               for (std::size_t i = 0; i < inner; ++i) {
                                 sr += g.g_r[base + i];
                                 si += g.g_i[base + i];
                               }
                               gb.g_r[c] += sr;
                               gb.g_i[c] += si;
                             }
                           }
                         });
}

Var ste_identity(Var z, CTensor forward_value) {
  if (!(forward_value.shape() == z.shape())) {
    throw std::invalid_argument("ste_identity: forward value " + forward_value.shape().str() +
                                " does not match input " + z.shape().str());
  }
  const int iz = z.id();
  return z.tape().record(OpKind::StraightThrough, {z}, std::move(forward_value),
                         [iz](Tape& t, const GradPair& g) { t.grad_buffer(iz) += g; });
}

// ---- optimisation -----------------------------------------------------------

void zero_grad(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->grad.reset();
}

void sgd_step(std::span<Parameter* const> params, double lr) {
  for (Parameter* p : params) {
    if (!p->grad) throw std::invalid_argument("sgd_step: parameter '" + p->name + "' has no gradient");
    for (std::size_t k = 0; k < p->value.numel(); ++k) {
      p->value.real()[k] -= lr * p->grad->g_r[k];
      p->value.imag()[k] -= lr * p->grad->g_i[k];
    }
  }
}

Adam::Adam(std::vector<Parameter*> params, Options options)
    : params_(std::move(params)), options_(options) {
  state_.reserve(params_.size());
  for (const Parameter* p : params_) {
    const std::size_t n = p->value.numel();
    state_.push_back(Moments{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                             std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)});
  }
}

void Adam::set_lr(double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
  options_.lr = lr;
}

void Adam::step() {
  for (const Parameter* p : params_) {
    if (!p->grad) throw std::invalid_argument("Adam::step: parameter '" + p->name + "' has no gradient");
  }
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  auto update = [&](std::span<double> value, std::span<const double> grad, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t k = 0; k < value.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * grad[k];
      v[k] = b2 * v[k] + (1.0 - b2) * grad[k] * grad[k];
      value[k] -= options_.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + options_.eps);
    }
  };
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    update(p.value.real(), p.grad->g_r.data(), state_[i].m_re, state_[i].v_re);
    update(p.value.imag(), p.grad->g_i.data(), state_[i].m_im, state_[i].v_im);
  }
}

void Adam::zero_grad() { cvnn::zero_grad(params_); }

}  // namespace cvnn
