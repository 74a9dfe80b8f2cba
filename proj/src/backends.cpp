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

// Naive, Gauss and block-matrix execution of complex linear and
// convolutional maps.

#include <atomic>
#include <memory>
#include <stdexcept>

#include "cvnn/layers.hpp"
#include "kernels.hpp"

namespace cvnn {

namespace testing {
namespace {
std::atomic<bool> gauss_linear_fault{false};
}
void set_gauss_linear_fault(bool enabled) { gauss_linear_fault = enabled; }
}  // namespace testing

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Naive: return "naive";
    case Backend::Gauss: return "gauss";
    case Backend::Block: return "block";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "naive") return Backend::Naive;
  if (name == "gauss") return Backend::Gauss;
  if (name == "block") return Backend::Block;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

namespace {

using kernels::RowMat;
using kernels::view;

struct LinearDims {
  std::size_t rows, in, out;
};

// dst += column sums of m, added in row order. Eigen's colwise().sum() picks
// its summation order from the destination's alignment, which would make
// bias gradients depend on where the allocator put them.
template <typename Matrix>
void add_column_sums(const Matrix& m, std::span<double> dst) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) dst[static_cast<std::size_t>(c)] += m(r, c);
  }
}

LinearDims linear_dims(Var z, Var weight) {
  const Shape& ws = weight.shape();
  const Shape& zs = z.shape();
  if (ws.rank() != 2 || zs.rank() == 0 || zs[zs.rank() - 1] != ws[1]) {
    throw std::invalid_argument("linear: input " + zs.str() + " does not match weight " +
                                ws.str());
  }
  return {zs.numel() / ws[1], ws[1], ws[0]};
}

Shape linear_output_shape(const Shape& in, std::size_t out) {
  std::vector<std::size_t> dims = in.dims();
  dims.back() = out;
  return Shape(std::move(dims));
}

void check_bias(std::optional<Var> bias, std::size_t out) {
  if (bias && (bias->shape().rank() != 1 || bias->shape()[0] != out)) {
    throw std::invalid_argument("bias shape " + bias->shape().str() + " does not match " +
                                std::to_string(out) + " outputs");
  }
}

// [[W_r, -W_i], [W_i, W_r]] for a row-major [out, in] complex weight block.
RowMat block_matrix(std::span<const double> wr, std::span<const double> wi, std::size_t out,
                    std::size_t in) {
  RowMat a(2 * out, 2 * in);
  const auto r = view(wr, out, in);
  const auto i = view(wi, out, in);
  a.topLeftCorner(out, in) = r;
  a.topRightCorner(out, in) = -i;
  a.bottomLeftCorner(out, in) = i;
  a.bottomRightCorner(out, in) = r;
  return a;
}

// Folds a gradient with respect to the block matrix back onto (W_r, W_i).
void fold_block_gradient(const RowMat& da, std::size_t out, std::size_t in,
                         std::span<double> gwr, std::span<double> gwi) {
  view(gwr, out, in) += da.topLeftCorner(out, in) + da.bottomRightCorner(out, in);
  view(gwi, out, in) += da.bottomLeftCorner(out, in) - da.topRightCorner(out, in);
}

Var block_linear(Var z, Var weight, std::optional<Var> bias) {
  const LinearDims d = linear_dims(z, weight);
  check_bias(bias, d.out);
  const CTensor& zv = z.value();
  const CTensor& wv = weight.value();

  RowMat stacked(d.rows, 2 * d.in);
  stacked.leftCols(d.in) = view(zv.real(), d.rows, d.in);
  stacked.rightCols(d.in) = view(zv.imag(), d.rows, d.in);
  const RowMat a = block_matrix(wv.real(), wv.imag(), d.out, d.in);
  RowMat y = stacked * a.transpose();

  CTensor out(linear_output_shape(zv.shape(), d.out));
  view(out.real(), d.rows, d.out) = y.leftCols(d.out);
  view(out.imag(), d.rows, d.out) = y.rightCols(d.out);
  if (bias) {
    const CTensor& b = bias->value();
    for (std::size_t r = 0; r < d.rows; ++r) {
      for (std::size_t o = 0; o < d.out; ++o) {
        out.real()[r * d.out + o] += b.real()[o];
        out.imag()[r * d.out + o] += b.imag()[o];
      }
    }
  }

  std::vector<Var> inputs{z, weight};
  if (bias) inputs.push_back(*bias);
  const int iz = z.id(), iw = weight.id(), ib = bias ? bias->id() : -1;
  auto saved_stacked = std::make_shared<RowMat>(std::move(stacked));
  auto saved_a = std::make_shared<RowMat>(a);
  return z.tape().record(
      OpKind::BlockLinear, std::move(inputs), std::move(out),
      [iz, iw, ib, d, saved_stacked, saved_a](Tape& t, const GradPair& g) {
        RowMat grad(d.rows, 2 * d.out);
        grad.leftCols(d.out) = view(g.g_r.data(), d.rows, d.out);
        grad.rightCols(d.out) = view(g.g_i.data(), d.rows, d.out);
        if (t.requires_grad(iz)) {
          const RowMat ds = grad * (*saved_a);
          GradPair& gz = t.grad_buffer(iz);
          view(gz.g_r.data(), d.rows, d.in) += ds.leftCols(d.in);
          view(gz.g_i.data(), d.rows, d.in) += ds.rightCols(d.in);
        }
        if (t.requires_grad(iw)) {
          const RowMat da = grad.transpose() * (*saved_stacked);
          GradPair& gw = t.grad_buffer(iw);
          fold_block_gradient(da, d.out, d.in, gw.g_r.data(), gw.g_i.data());
        }
        if (ib >= 0 && t.requires_grad(ib)) {
          GradPair& gb = t.grad_buffer(ib);
          add_column_sums(grad.leftCols(d.out), gb.g_r.data());
          add_column_sums(grad.rightCols(d.out), gb.g_i.data());
        }
      });
}

// Real-plane matmul on [..., in] inputs; reshapes to rank 2 where needed.
Var matmul_rows(Var x, Var w, const LinearDims& d) {
  if (x.shape().rank() == 2) return matmul_nt(x, w);
  Var flat = reshape(x, Shape{d.rows, d.in});
  return reshape(matmul_nt(flat, w), linear_output_shape(x.shape(), d.out));
}

Var naive_linear(Var z, Var weight, std::optional<Var> bias) {
  const LinearDims d = linear_dims(z, weight);
  check_bias(bias, d.out);
  Var x = real_part(z), y = imag_part(z);
  Var wr = real_part(weight), wi = imag_part(weight);
  Var re = sub(matmul_rows(x, wr, d), matmul_rows(y, wi, d));
  Var im = add(matmul_rows(x, wi, d), matmul_rows(y, wr, d));
  Var out = make_complex(re, im);
  if (bias) out = add_bias(out, *bias, out.shape().rank() - 1);
  return out;
}

Var gauss_linear(Var z, Var weight, std::optional<Var> bias) {
  const LinearDims d = linear_dims(z, weight);
  check_bias(bias, d.out);
  Var x = real_part(z), y = imag_part(z);
  Var wr = real_part(weight), wi = imag_part(weight);
  Var k1 = matmul_rows(x, add(wr, wi), d);
  Var k2 = matmul_rows(sub(y, x), wr, d);
  Var k3 = matmul_rows(add(x, y), wi, d);
  Var re = sub(k1, k3);
  Var im = testing::gauss_linear_fault ? sub(k1, k2) : add(k1, k2);
  Var out = make_complex(re, im);
  if (bias) out = add_bias(out, *bias, out.shape().rank() - 1);
  return out;
}

void check_conv_weight(Var weight, const ConvGeometry& g, bool one_d) {
  if (!(weight.shape() == g.weight_shape(one_d))) {
    throw std::invalid_argument("convolution: weight " + weight.shape().str() +
                                " does not match geometry " + g.weight_shape(one_d).str());
  }
}

// Single real convolution over real planes.
Var conv_real(Var x, Var w, const ConvGeometry& g, bool one_d) {
  const ConvExtent e = conv_extent(g, x.shape(), one_d);
  const std::size_t cols_n = e.batch * e.out_plane();
  const std::size_t patch = g.patch_size();
  const std::size_t cout = g.group_out();
  auto cols = std::make_shared<std::vector<double>>(g.groups * patch * cols_n);
  RTensor out(conv_output_shape(g, e, one_d));
  std::vector<double> y(cout * cols_n);
  for (std::size_t grp = 0; grp < g.groups; ++grp) {
    std::span<double> c(cols->data() + grp * patch * cols_n, patch * cols_n);
    kernels::im2col(x.value().real(), g, e, grp, c);
    view(std::span<double>(y), cout, cols_n).noalias() =
        view(w.value().real().subspan(grp * cout * patch, cout * patch), cout, patch) *
        view(std::span<const double>(c), patch, cols_n);
    kernels::scatter_group_output(y, cout, grp, g.out_channels, e, out.data());
  }
  const int ix = x.id(), iw = w.id();
  return x.tape().record(
      OpKind::ConvReal, {x, w}, CTensor::from_real(out),
      [ix, iw, g, e, cols, cols_n, patch, cout](Tape& t, const GradPair& grad) {
        std::vector<double> gy(cout * cols_n);
        std::vector<double> dcols(patch * cols_n);
        for (std::size_t grp = 0; grp < g.groups; ++grp) {
          kernels::gather_group_output(grad.g_r.data(), cout, grp, g.out_channels, e, gy);
          const auto gym = view(std::span<const double>(gy), cout, cols_n);
          std::span<const double> c(cols->data() + grp * patch * cols_n, patch * cols_n);
          if (t.requires_grad(iw)) {
            view(t.grad_buffer(iw).g_r.data().subspan(grp * cout * patch, cout * patch), cout,
                 patch)
                .noalias() += gym * view(c, patch, cols_n).transpose();
          }
          if (t.requires_grad(ix)) {
            view(std::span<double>(dcols), patch, cols_n).noalias() =
                view(t.value(iw).real().subspan(grp * cout * patch, cout * patch), cout, patch)
                    .transpose() *
                gym;
            kernels::col2im_add(dcols, g, e, grp, t.grad_buffer(ix).g_r.data());
          }
        }
      });
}

Var naive_conv(Var z, Var weight, std::optional<Var> bias, const ConvGeometry& g, bool one_d) {
  Var x = real_part(z), y = imag_part(z);
  Var wr = real_part(weight), wi = imag_part(weight);
  Var re = sub(conv_real(x, wr, g, one_d), conv_real(y, wi, g, one_d));
  Var im = add(conv_real(x, wi, g, one_d), conv_real(y, wr, g, one_d));
  Var out = make_complex(re, im);
  if (bias) out = add_bias(out, *bias, 1);
  return out;
}

Var gauss_conv(Var z, Var weight, std::optional<Var> bias, const ConvGeometry& g, bool one_d) {
  Var x = real_part(z), y = imag_part(z);
  Var wr = real_part(weight), wi = imag_part(weight);
  Var k1 = conv_real(x, add(wr, wi), g, one_d);
  Var k2 = conv_real(sub(y, x), wr, g, one_d);
  Var k3 = conv_real(add(x, y), wi, g, one_d);
  Var out = make_complex(sub(k1, k3), add(k1, k2));
  if (bias) out = add_bias(out, *bias, 1);
  return out;
}

Var block_conv(Var z, Var weight, std::optional<Var> bias, const ConvGeometry& g, bool one_d) {
  const ConvExtent e = conv_extent(g, z.shape(), one_d);
  const std::size_t cols_n = e.batch * e.out_plane();
  const std::size_t patch = g.patch_size();
  const std::size_t cout = g.group_out();
  const CTensor& zv = z.value();
  const CTensor& wv = weight.value();

  // Per group: stacked patches [2 * patch x cols_n] (real rows, then imaginary).
  auto cols = std::make_shared<std::vector<double>>(g.groups * 2 * patch * cols_n);
  auto blocks = std::make_shared<std::vector<RowMat>>();
  blocks->reserve(g.groups);
  CTensor out(conv_output_shape(g, e, one_d));
  RowMat y(2 * cout, cols_n);
  for (std::size_t grp = 0; grp < g.groups; ++grp) {
    double* base = cols->data() + grp * 2 * patch * cols_n;
    kernels::im2col(zv.real(), g, e, grp, std::span<double>(base, patch * cols_n));
    kernels::im2col(zv.imag(), g, e, grp, std::span<double>(base + patch * cols_n, patch * cols_n));
    blocks->push_back(block_matrix(wv.real().subspan(grp * cout * patch, cout * patch),
                                   wv.imag().subspan(grp * cout * patch, cout * patch), cout,
                                   patch));
    y.noalias() = blocks->back() * view(std::span<const double>(base, 2 * patch * cols_n),
                                        2 * patch, cols_n);
    kernels::scatter_group_output(std::span<const double>(y.data(), cout * cols_n), cout, grp,
                                  g.out_channels, e, out.real());
    kernels::scatter_group_output(std::span<const double>(y.data() + cout * cols_n, cout * cols_n),
                                  cout, grp, g.out_channels, e, out.imag());
  }
  if (bias) {
    if (bias->shape().rank() != 1 || bias->shape()[0] != g.out_channels) {
      throw std::invalid_argument("convolution: bias " + bias->shape().str() +
                                  " does not match out_channels");
    }
    const CTensor& b = bias->value();
    const std::size_t plane = e.out_plane();
    for (std::size_t bb = 0; bb < e.batch; ++bb) {
      for (std::size_t c = 0; c < g.out_channels; ++c) {
        double* re = out.real().data() + (bb * g.out_channels + c) * plane;
        double* im = out.imag().data() + (bb * g.out_channels + c) * plane;
        for (std::size_t p = 0; p < plane; ++p) {
          re[p] += b.real()[c];
          im[p] += b.imag()[c];
        }
      }
    }
  }

  std::vector<Var> inputs{z, weight};
  if (bias) inputs.push_back(*bias);
  const int iz = z.id(), iw = weight.id(), ib = bias ? bias->id() : -1;
  return z.tape().record(
      OpKind::BlockConv, std::move(inputs), std::move(out),
      [iz, iw, ib, g, e, cols, blocks, cols_n, patch, cout](Tape& t, const GradPair& grad) {
        RowMat gy(2 * cout, cols_n);
        RowMat dcols(2 * patch, cols_n);
        for (std::size_t grp = 0; grp < g.groups; ++grp) {
          kernels::gather_group_output(grad.g_r.data(), cout, grp, g.out_channels, e,
                                       std::span<double>(gy.data(), cout * cols_n));
          kernels::gather_group_output(grad.g_i.data(), cout, grp, g.out_channels, e,
                                       std::span<double>(gy.data() + cout * cols_n, cout * cols_n));
          const double* base = cols->data() + grp * 2 * patch * cols_n;
          if (t.requires_grad(iw)) {
            const RowMat da =
                gy * view(std::span<const double>(base, 2 * patch * cols_n), 2 * patch, cols_n)
                         .transpose();
            GradPair& gw = t.grad_buffer(iw);
            fold_block_gradient(da, cout, patch,
                                gw.g_r.data().subspan(grp * cout * patch, cout * patch),
                                gw.g_i.data().subspan(grp * cout * patch, cout * patch));
          }
          if (t.requires_grad(iz)) {
            dcols.noalias() = (*blocks)[grp].transpose() * gy;
            GradPair& gz = t.grad_buffer(iz);
            kernels::col2im_add(std::span<const double>(dcols.data(), patch * cols_n), g, e, grp,
                                gz.g_r.data());
            kernels::col2im_add(
                std::span<const double>(dcols.data() + patch * cols_n, patch * cols_n), g, e, grp,
                gz.g_i.data());
          }
        }
        if (ib >= 0 && t.requires_grad(ib)) {
          GradPair& gb = t.grad_buffer(ib);
          const std::size_t plane = e.out_plane();
          for (std::size_t bb = 0; bb < e.batch; ++bb) {
            for (std::size_t c = 0; c < g.out_channels; ++c) {
              const std::size_t off = (bb * g.out_channels + c) * plane;
              double sr = 0.0, si = 0.0;
              for (std::size_t p = 0; p < plane; ++p) {
                sr += grad.g_r[off + p];
                si += grad.g_i[off + p];
              }
              gb.g_r[c] += sr;
              gb.g_i[c] += si;
            }
          }
        }
      });
}

}  // namespace

Var complex_linear(Var z, Var weight, std::optional<Var> bias, Backend backend) {
  switch (backend) {
    case Backend::Naive: return naive_linear(z, weight, bias);
    case Backend::Gauss: return gauss_linear(z, weight, bias);
    case Backend::Block: return block_linear(z, weight, bias);
  }
  throw std::invalid_argument("complex_linear: unknown backend");
}

Var complex_conv(Var z, Var weight, std::optional<Var> bias, const ConvGeometry& geometry,
                 bool one_d, Backend backend) {
  geometry.validate();
  check_conv_weight(weight, geometry, one_d);
  if (bias && (bias->shape().rank() != 1 || bias->shape()[0] != geometry.out_channels)) {
    throw std::invalid_argument("convolution: bias " + bias->shape().str() +
                                " does not match out_channels");
  }
  switch (backend) {
    case Backend::Naive: return naive_conv(z, weight, bias, geometry, one_d);
    case Backend::Gauss: return gauss_conv(z, weight, bias, geometry, one_d);
    case Backend::Block: return block_conv(z, weight, bias, geometry, one_d);
  }
  throw std::invalid_argument("complex_conv: unknown backend");
}

Var real_linear(Var x, Var weight, std::optional<Var> bias) {
  const LinearDims d = linear_dims(x, weight);
  check_bias(bias, d.out);
  RTensor out(linear_output_shape(x.shape(), d.out));
  auto y = view(out.data(), d.rows, d.out);
  y.noalias() = view(x.value().real(), d.rows, d.in) *
                view(weight.value().real(), d.out, d.in).transpose();
  if (bias) y.rowwise() += view(bias->value().real(), 1, d.out).row(0);

  std::vector<Var> inputs{x, weight};
  if (bias) inputs.push_back(*bias);
  const int ix = x.id(), iw = weight.id(), ib = bias ? bias->id() : -1;
  return x.tape().record(OpKind::LinearReal, std::move(inputs), CTensor::from_real(out),
                         [ix, iw, ib, d](Tape& t, const GradPair& g) {
                           const auto gy = view(g.g_r.data(), d.rows, d.out);
                           if (t.requires_grad(ix)) {
                             view(t.grad_buffer(ix).g_r.data(), d.rows, d.in).noalias() +=
                                 gy * view(t.value(iw).real(), d.out, d.in);
                           }
                           if (t.requires_grad(iw)) {
                             view(t.grad_buffer(iw).g_r.data(), d.out, d.in).noalias() +=
                                 gy.transpose() * view(t.value(ix).real(), d.rows, d.in);
                           }
                           if (ib >= 0 && t.requires_grad(ib)) {
                             add_column_sums(gy, t.grad_buffer(ib).g_r.data());
                           }
                         });
}

}  // namespace cvnn
