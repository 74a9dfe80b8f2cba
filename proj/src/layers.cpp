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

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvnn/layers.hpp"

namespace cvnn {

CTensor glorot_complex(const Shape& shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)) / std::sqrt(2.0);
  std::uniform_real_distribution<double> dist(-limit, limit);
  CTensor w(shape);
  for (double& v : w.real()) v = dist(rng);
  for (double& v : w.imag()) v = dist(rng);
  return w;
}

CTensor glorot_real(const Shape& shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  CTensor w(shape);
  for (double& v : w.real()) v = dist(rng);
  return w;
}

// ---- activations -----------------------------------------------------------

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

CTensor split_activation(const CTensor& z, const std::function<double(double)>& f) {
  CTensor out(z.shape());
  for (std::size_t k = 0; k < z.numel(); ++k) {
    out.real()[k] = f(z.real()[k]);
    out.imag()[k] = f(z.imag()[k]);
  }
  return out;
}

namespace {

Var split_pointwise(Var z, OpKind kind, double (*f)(double, double),
                    double (*df)(double, double), double param) {
  CTensor out(z.shape());
  const CTensor& v = z.value();
  for (std::size_t k = 0; k < v.numel(); ++k) {
    out.real()[k] = f(v.real()[k], param);
    out.imag()[k] = f(v.imag()[k], param);
  }
  const int iz = z.id();
  return z.tape().record(kind, {z}, std::move(out), [iz, df, param](Tape& t, const GradPair& g) {
    const CTensor& in = t.value(iz);
    GradPair& gz = t.grad_buffer(iz);
    for (std::size_t k = 0; k < in.numel(); ++k) {
      gz.g_r[k] += g.g_r[k] * df(in.real()[k], param);
      gz.g_i[k] += g.g_i[k] * df(in.imag()[k], param);
    }
  });
}

double leaky(double x, double slope) { return x > 0.0 ? x : slope * x; }
double leaky_d(double x, double slope) { return x > 0.0 ? 1.0 : slope; }
double gelu_p(double x, double) { return gelu(x); }
double gelu_dp(double x, double) { return gelu_derivative(x); }

}  // namespace

Var split_gelu(Var z) { return split_pointwise(z, OpKind::SplitGelu, gelu_p, gelu_dp, 0.0); }

Var split_leaky_relu(Var z, double slope) {
  return split_pointwise(z, OpKind::SplitLeakyRelu, leaky, leaky_d, slope);
}

MagnitudeFn MagnitudeFn::identity() {
  return {"identity", [](double r) { return r; }, [](double) { return 1.0; }};
}

MagnitudeFn MagnitudeFn::relu() {
  return {"relu", [](double r) { return std::max(r, 0.0); },
          [](double r) { return r > 0.0 ? 1.0 : 0.0; }};
}

MagnitudeFn MagnitudeFn::tanh() {
  return {"tanh", [](double r) { return std::tanh(r); },
          [](double r) {
            const double t = std::tanh(r);
            return 1.0 - t * t;
          }};
}

CTensor mag_activation(const CTensor& z, const MagnitudeFn& fn) {
  CTensor out(z.shape());
  for (std::size_t k = 0; k < z.numel(); ++k) {
    const double x = z.real()[k], y = z.imag()[k];
    const double r = std::hypot(x, y);
    const double fr = fn.f(r);
    if (!(fr >= 0.0)) {
      throw std::domain_error("mag_activation: f_Mag '" + fn.name + "' returned " +
                              std::to_string(fr) + " for magnitude " + std::to_string(r));
    }
    if (r == 0.0) {
      out.real()[k] = fr;  // phase of zero is 0
    } else {
      out.real()[k] = fr * (x / r);
      out.imag()[k] = fr * (y / r);
    }
  }
  return out;
}

Var mag_activation(Var z, const MagnitudeFn& fn) {
  CTensor out = mag_activation(z.value(), fn);
  const int iz = z.id();
  return z.tape().record(OpKind::MagActivation, {z}, std::move(out),
                         [iz, fn](Tape& t, const GradPair& g) {
                           const CTensor& in = t.value(iz);
                           GradPair& gz = t.grad_buffer(iz);
                           for (std::size_t k = 0; k < in.numel(); ++k) {
                             const double x = in.real()[k], y = in.imag()[k];
                             const double r = std::hypot(x, y);
                             if (r == 0.0) {
                               const double d0 = fn.df(0.0);
                               gz.g_r[k] += d0 * g.g_r[k];
                               gz.g_i[k] += d0 * g.g_i[k];
                               continue;
                             }
                             // out = s(r) (x, y) with s = f(r) / r.
                             const double s = fn.f(r) / r;
                             const double ds = (fn.df(r) * r - fn.f(r)) / (r * r);
                             const double proj = x * g.g_r[k] + y * g.g_i[k];
                             gz.g_r[k] += s * g.g_r[k] + ds * (x / r) * proj;
                             gz.g_i[k] += s * g.g_i[k] + ds * (y / r) * proj;
                           }
                         });
}

// ---- complex layer normalisation -------------------------------------------

namespace {

struct RowStats {
  double mu_x, mu_y;
  double a, b, d;          // regularised covariance [[a, b], [b, d]]
  double m00, m01, m11;    // its inverse square root (symmetric)
};

RowStats whitening_stats(const double* x, const double* y, std::size_t n, double eps) {
  RowStats s{};
  for (std::size_t j = 0; j < n; ++j) {
    s.mu_x += x[j];
    s.mu_y += y[j];
  }
  s.mu_x /= static_cast<double>(n);
  s.mu_y /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double cx = x[j] - s.mu_x, cy = y[j] - s.mu_y;
    sxx += cx * cx;
    sxy += cx * cy;
    syy += cy * cy;
  }
  s.a = sxx / static_cast<double>(n) + eps;
  s.b = sxy / static_cast<double>(n);
  s.d = syy / static_cast<double>(n) + eps;
  if (!std::isfinite(s.a) || !std::isfinite(s.b) || !std::isfinite(s.d)) {
    throw std::runtime_error("complex_layernorm: non-finite covariance");
  }
  // For SPD S: sqrt(S) = (S + sI) / t with s = sqrt(det S), t = sqrt(tr S + 2s),
  // hence S^{-1/2} = adj(S + sI) / (s t).
  const double det = std::max(s.a * s.d - s.b * s.b, 0.0);
  const double root_det = std::sqrt(det);
  const double t = std::sqrt(s.a + s.d + 2.0 * root_det);
  const double k = 1.0 / (root_det * t);
  s.m00 = k * (s.d + root_det);
  s.m01 = -k * s.b;
  s.m11 = k * (s.a + root_det);
  return s;
}

// Adjoint of the Frechet derivative of S -> S^{-1/2} at a symmetric 2x2 S,
// applied to the 2x2 cotangent gm. Uses the eigendecomposition of S with the
// divided differences of f(l) = l^{-1/2}, written in a form that is exact at
// repeated eigenvalues.
void inverse_sqrt_adjoint(const RowStats& s, const double gm[2][2], double gs[2][2]) {
  const double phi = 0.5 * std::atan2(2.0 * s.b, s.a - s.d);
  const double c = std::cos(phi), sn = std::sin(phi);
  const double half_tr = 0.5 * (s.a + s.d);
  const double r = std::hypot(0.5 * (s.a - s.d), s.b);
  const double lam[2] = {half_tr + r, half_tr - r};
  const double v[2][2] = {{c, -sn}, {sn, c}};  // columns are eigenvectors
  double f[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double si = std::sqrt(lam[i]), sj = std::sqrt(lam[j]);
      f[i][j] = -1.0 / (si * sj * (si + sj));
    }
  }
  double rotated[2][2] = {};  // V^T gm V, then Hadamard with f
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) acc += v[p][i] * gm[p][q] * v[q][j];
      }
      rotated[i][j] = acc * f[i][j];
    }
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) acc += v[i][p] * rotated[p][q] * v[j][q];
      }
      gs[i][j] = acc;
    }
  }
}

}  // namespace

Var complex_layernorm(Var z, Var gamma, Var beta, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("complex_layernorm: eps must be positive");
  const Shape& shape = z.shape();
  if (shape.rank() == 0) throw std::invalid_argument("complex_layernorm: scalar input");
  const std::size_t n = shape[shape.rank() - 1];
  if (n < 2) throw std::invalid_argument("complex_layernorm: normalized axis length must be >= 2");
  if (!(gamma.shape() == Shape{n}) || !(beta.shape() == Shape{n})) {
    throw std::invalid_argument("complex_layernorm: gamma/beta must have shape [" +
                                std::to_string(n) + "]");
  }
  const std::size_t rows = shape.numel() / n;
  const CTensor& v = z.value();
  const CTensor& gv = gamma.value();
  const CTensor& bv = beta.value();
  CTensor out(shape);
  for (std::size_t row = 0; row < rows; ++row) {
    const double* x = v.real().data() + row * n;
    const double* y = v.imag().data() + row * n;
    const RowStats s = whitening_stats(x, y, n, eps);
    for (std::size_t j = 0; j < n; ++j) {
      const double cx = x[j] - s.mu_x, cy = y[j] - s.mu_y;
      const double nx = s.m00 * cx + s.m01 * cy;
      const double ny = s.m01 * cx + s.m11 * cy;
      const double gr = gv.real()[j], gi = gv.imag()[j];
      out.real()[row * n + j] = gr * nx - gi * ny + bv.real()[j];
      out.imag()[row * n + j] = gr * ny + gi * nx + bv.imag()[j];
    }
  }
  const int iz = z.id(), ig = gamma.id(), ib = beta.id();
  return z.tape().record(
      OpKind::LayerNorm, {z, gamma, beta}, std::move(out),
      [iz, ig, ib, n, rows, eps](Tape& t, const GradPair& g) {
        const CTensor& v = t.value(iz);
        const CTensor& gv = t.value(ig);
        const bool need_z = t.requires_grad(iz);
        const bool need_g = t.requires_grad(ig);
        std::vector<double> cx(n), cy(n), dnx(n), dny(n);
        for (std::size_t row = 0; row < rows; ++row) {
          const double* x = v.real().data() + row * n;
          const double* y = v.imag().data() + row * n;
          const double* gor = g.g_r.data().data() + row * n;
          const double* goi = g.g_i.data().data() + row * n;
          const RowStats s = whitening_stats(x, y, n, eps);
          double gm[2][2] = {};
          for (std::size_t j = 0; j < n; ++j) {
            cx[j] = x[j] - s.mu_x;
            cy[j] = y[j] - s.mu_y;
            const double nx = s.m00 * cx[j] + s.m01 * cy[j];
            const double ny = s.m01 * cx[j] + s.m11 * cy[j];
            const double gr = gv.real()[j], gi = gv.imag()[j];
            if (t.requires_grad(ib)) {
              GradPair& gb = t.grad_buffer(ib);
              gb.g_r[j] += gor[j];
              gb.g_i[j] += goi[j];
            }
            if (need_g) {
              GradPair& gg = t.grad_buffer(ig);
              gg.g_r[j] += gor[j] * nx + goi[j] * ny;
              gg.g_i[j] += -gor[j] * ny + goi[j] * nx;
            }
            dnx[j] = gor[j] * gr + goi[j] * gi;
            dny[j] = -gor[j] * gi + goi[j] * gr;
            gm[0][0] += dnx[j] * cx[j];
            gm[0][1] += dnx[j] * cy[j];
            gm[1][0] += dny[j] * cx[j];
            gm[1][1] += dny[j] * cy[j];
          }
          if (!need_z) continue;
          double gs[2][2];
          inverse_sqrt_adjoint(s, gm, gs);
          const double inv_n = 1.0 / static_cast<double>(n);
          const double h00 = 2.0 * gs[0][0] * inv_n;
          const double h01 = (gs[0][1] + gs[1][0]) * inv_n;
          const double h11 = 2.0 * gs[1][1] * inv_n;
          double mean_x = 0.0, mean_y = 0.0;
          std::vector<double>& dcx = dnx;  // reused in place
          std::vector<double>& dcy = dny;
          for (std::size_t j = 0; j < n; ++j) {
            const double ax = s.m00 * dnx[j] + s.m01 * dny[j];
            const double ay = s.m01 * dnx[j] + s.m11 * dny[j];
            dcx[j] = ax + h00 * cx[j] + h01 * cy[j];
            dcy[j] = ay + h01 * cx[j] + h11 * cy[j];
            mean_x += dcx[j];
            mean_y += dcy[j];
          }
          mean_x *= inv_n;
          mean_y *= inv_n;
          GradPair& gz = t.grad_buffer(iz);
          for (std::size_t j = 0; j < n; ++j) {
            gz.g_r[row * n + j] += dcx[j] - mean_x;
            gz.g_i[row * n + j] += dcy[j] - mean_y;
          }
        }
      });
}

// ---- phase quantisation ---------------------------------------------------------

CTensor phase_quantize(const CTensor& z, int levels) {
  if (levels < 0) throw std::invalid_argument("phase_quantize: levels must be >= 0");
  if (levels == 0) return z;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double n = static_cast<double>(levels);
  CTensor out(z.shape());
  for (std::size_t k = 0; k < z.numel(); ++k) {
    const double x = z.real()[k], y = z.imag()[k];
    const double r = std::hypot(x, y);
    if (r == 0.0) continue;
    const double theta = principal_phase(x, y);
    double q = kTwoPi / n * std::round(n * theta / kTwoPi);
    if (q > std::numbers::pi) q -= kTwoPi;
    if (q <= -std::numbers::pi) q += kTwoPi;
    out.real()[k] = r * std::cos(q);
    out.imag()[k] = r * std::sin(q);
  }
  return out;
}

Var phase_quantize(Var z, int levels) {
  if (levels == 0) return z;
  return ste_identity(z, phase_quantize(z.value(), levels));
}

// ---- layers ---------------------------------------------------------------------

ComplexLinear::ComplexLinear(std::string name, std::size_t in, std::size_t out, bool bias,
                             Rng& rng, Backend backend)
    : weight(name + ".weight", glorot_complex(Shape{out, in}, in, out, rng)),
      in_(in),
      out_(out),
      backend_(backend) {
  if (in == 0 || out == 0) throw std::invalid_argument("ComplexLinear: zero width");
  if (bias) this->bias.emplace(name + ".bias", CTensor(Shape{out}));
}

Var ComplexLinear::forward(Tape& tape, Var z) {
  std::optional<Var> b;
  if (bias) b = tape.param(*bias);
  return complex_linear(z, tape.param(weight), b, backend_);
}

std::vector<Parameter*> ComplexLinear::parameters() {
  std::vector<Parameter*> p{&weight};
  if (bias) p.push_back(&*bias);
  return p;
}

namespace {

std::size_t kernel_area(const ConvGeometry& g) { return g.kernel_h * g.kernel_w; }

}  // namespace

ComplexConv1d::ComplexConv1d(std::string name, const ConvGeometry& geometry, bool bias, Rng& rng,
                             Backend backend)
    : geometry_(geometry), backend_(backend) {
  geometry_.validate();
  if (geometry_.kernel_h != 1 || geometry_.stride_h != 1 || geometry_.pad_h != 0 ||
      geometry_.dilation_h != 1) {
    throw std::invalid_argument("ComplexConv1d: geometry has a non-trivial height axis");
  }
  const std::size_t area = kernel_area(geometry_);
  weight = Parameter(name + ".weight",
                     glorot_complex(geometry_.weight_shape(true), geometry_.group_in() * area,
                                    geometry_.group_out() * area, rng));
  if (bias) this->bias.emplace(name + ".bias", CTensor(Shape{geometry_.out_channels}));
}

Var ComplexConv1d::forward(Tape& tape, Var z) {
  std::optional<Var> b;
  if (bias) b = tape.param(*bias);
  return complex_conv(z, tape.param(weight), b, geometry_, true, backend_);
}

std::vector<Parameter*> ComplexConv1d::parameters() {
  std::vector<Parameter*> p{&weight};
  if (bias) p.push_back(&*bias);
  return p;
}

ComplexConv2d::ComplexConv2d(std::string name, const ConvGeometry& geometry, bool bias, Rng& rng,
                             Backend backend)
    : geometry_(geometry), backend_(backend) {
  geometry_.validate();
  const std::size_t area = kernel_area(geometry_);
  weight = Parameter(name + ".weight",
                     glorot_complex(geometry_.weight_shape(false), geometry_.group_in() * area,
                                    geometry_.group_out() * area, rng));
  if (bias) this->bias.emplace(name + ".bias", CTensor(Shape{geometry_.out_channels}));
}

Var ComplexConv2d::forward(Tape& tape, Var z) {
  std::optional<Var> b;
  if (bias) b = tape.param(*bias);
  return complex_conv(z, tape.param(weight), b, geometry_, false, backend_);
}

std::vector<Parameter*> ComplexConv2d::parameters() {
  std::vector<Parameter*> p{&weight};
  if (bias) p.push_back(&*bias);
  return p;
}

ComplexLayerNorm::ComplexLayerNorm(std::string name, std::size_t features, double eps)
    : gamma(name + ".gamma", CTensor(Shape{features}, std::vector<double>(features, 1.0),
                                     std::vector<double>(features, 0.0))),
      beta(name + ".beta", CTensor(Shape{features})),
      eps_(eps) {
  if (features < 2) throw std::invalid_argument("ComplexLayerNorm: need at least 2 features");
  if (!(eps > 0.0)) throw std::invalid_argument("ComplexLayerNorm: eps must be positive");
}

Var ComplexLayerNorm::forward(Tape& tape, Var z) {
  return complex_layernorm(z, tape.param(gamma), tape.param(beta), eps_);
}

PhaseQuantizer::PhaseQuantizer(int levels) : levels_(levels) {
  if (levels < 0) throw std::invalid_argument("PhaseQuantizer: levels must be >= 0");
}

Linear::Linear(std::string name, std::size_t in, std::size_t out, bool bias, Rng& rng)
    : weight(name + ".weight", glorot_real(Shape{out, in}, in, out, rng)) {
  if (in == 0 || out == 0) throw std::invalid_argument("Linear: zero width");
  if (bias) this->bias.emplace(name + ".bias", CTensor(Shape{out}));
}

Var Linear::forward(Tape& tape, Var x) {
  std::optional<Var> b;
  if (bias) b = tape.param(*bias);
  return real_linear(x, tape.param(weight), b);
}

std::vector<Parameter*> Linear::parameters() {
  std::vector<Parameter*> p{&weight};
  if (bias) p.push_back(&*bias);
  return p;
}

}  // namespace cvnn
