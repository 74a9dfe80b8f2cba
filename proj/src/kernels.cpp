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

#include "kernels.hpp"

#include <stdexcept>
#include <string>

namespace cvnn {

ConvGeometry ConvGeometry::conv1d(std::size_t in, std::size_t out, std::size_t kernel,
                                  std::size_t stride, std::size_t pad, std::size_t dilation,
                                  std::size_t groups) {
  ConvGeometry g;
  g.in_channels = in;
  g.out_channels = out;
  g.kernel_w = kernel;
  g.stride_w = stride;
  g.pad_w = pad;
  g.dilation_w = dilation;
  g.groups = groups;
  return g;
}

void ConvGeometry::validate() const {
  if (in_channels == 0 || out_channels == 0 || kernel_h == 0 || kernel_w == 0 ||
      stride_h == 0 || stride_w == 0 || dilation_h == 0 || dilation_w == 0 || groups == 0) {
    throw std::invalid_argument("ConvGeometry: extents, strides and dilations must be positive");
  }
  if (in_channels % groups != 0 || out_channels % groups != 0) {
    throw std::invalid_argument("ConvGeometry: groups=" + std::to_string(groups) +
                                " must divide in_channels=" + std::to_string(in_channels) +
                                " and out_channels=" + std::to_string(out_channels));
  }
}

Shape ConvGeometry::weight_shape(bool one_d) const {
  if (one_d) return Shape{out_channels, group_in(), kernel_w};
  return Shape{out_channels, group_in(), kernel_h, kernel_w};
}

std::size_t conv_output_length(std::size_t n, std::size_t kernel, std::size_t stride,
                               std::size_t pad, std::size_t dilation) {
  const std::size_t span = dilation * (kernel - 1) + 1;
  if (n + 2 * pad < span) {
    throw std::invalid_argument("convolution: padded input length " +
                                std::to_string(n + 2 * pad) + " shorter than dilated kernel " +
                                std::to_string(span));
  }
  return (n + 2 * pad - span) / stride + 1;
}

ConvExtent conv_extent(const ConvGeometry& g, const Shape& input, bool one_d) {
  g.validate();
  const std::size_t rank = one_d ? 3 : 4;
  if (input.rank() != rank) {
    throw std::invalid_argument("convolution: expected rank-" + std::to_string(rank) +
                                " input, got " + input.str());
  }
  if (input[1] != g.in_channels) {
    throw std::invalid_argument("convolution: input has " + std::to_string(input[1]) +
                                " channels, layer expects " + std::to_string(g.in_channels));
  }
  ConvExtent e;
  e.batch = input[0];
  e.height = one_d ? 1 : input[2];
  e.width = one_d ? input[2] : input[3];
  e.out_h = conv_output_length(e.height, g.kernel_h, g.stride_h, g.pad_h, g.dilation_h);
  e.out_w = conv_output_length(e.width, g.kernel_w, g.stride_w, g.pad_w, g.dilation_w);
  return e;
}

Shape conv_output_shape(const ConvGeometry& g, const ConvExtent& e, bool one_d) {
  if (one_d) return Shape{e.batch, g.out_channels, e.out_w};
  return Shape{e.batch, g.out_channels, e.out_h, e.out_w};
}

namespace kernels {

namespace {

template <typename Visit>
void for_each_patch_entry(const ConvGeometry& g, const ConvExtent& e, std::size_t group,
                          Visit visit) {
  const std::size_t cols_n = e.batch * e.out_plane();
  const std::size_t cin = g.group_in();
  for (std::size_t c = 0; c < cin; ++c) {
    const std::size_t channel = group * cin + c;
    for (std::size_t ki = 0; ki < g.kernel_h; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel_w; ++kj) {
        const std::size_t row = (c * g.kernel_h + ki) * g.kernel_w + kj;
        const std::size_t row_offset = row * cols_n;
        for (std::size_t b = 0; b < e.batch; ++b) {
          const std::size_t in_base = (b * g.in_channels + channel) * e.in_plane();
          const std::size_t col_base = row_offset + b * e.out_plane();
          for (std::size_t oh = 0; oh < e.out_h; ++oh) {
            const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride_h + ki * g.dilation_h) -
                                      static_cast<std::ptrdiff_t>(g.pad_h);
            const bool row_ok = ih >= 0 && ih < static_cast<std::ptrdiff_t>(e.height);
            for (std::size_t ow = 0; ow < e.out_w; ++ow) {
              const std::ptrdiff_t iw =
                  static_cast<std::ptrdiff_t>(ow * g.stride_w + kj * g.dilation_w) -
                  static_cast<std::ptrdiff_t>(g.pad_w);
              const bool ok = row_ok && iw >= 0 && iw < static_cast<std::ptrdiff_t>(e.width);
              const std::size_t col = col_base + oh * e.out_w + ow;
              if (ok) {
                visit(col, in_base + static_cast<std::size_t>(ih) * e.width +
                               static_cast<std::size_t>(iw));
              } else {
                visit(col, static_cast<std::size_t>(-1));
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace

void im2col(std::span<const double> x, const ConvGeometry& g, const ConvExtent& e,
            std::size_t group, std::span<double> cols) {
  for_each_patch_entry(g, e, group, [&](std::size_t col, std::size_t src) {
    cols[col] = src == static_cast<std::size_t>(-1) ? 0.0 : x[src];
  });
}

void col2im_add(std::span<const double> cols, const ConvGeometry& g, const ConvExtent& e,
                std::size_t group, std::span<double> dx) {
  for_each_patch_entry(g, e, group, [&](std::size_t col, std::size_t dst) {
    if (dst != static_cast<std::size_t>(-1)) dx[dst] += cols[col];
  });
}

void scatter_group_output(std::span<const double> y, std::size_t rows, std::size_t group,
                          std::size_t out_channels, const ConvExtent& e,
                          std::span<double> out) {
  const std::size_t plane = e.out_plane();
  const std::size_t cols_n = e.batch * plane;
  for (std::size_t o = 0; o < rows; ++o) {
    for (std::size_t b = 0; b < e.batch; ++b) {
      const double* src = y.data() + o * cols_n + b * plane;
      double* dst = out.data() + (b * out_channels + group * rows + o) * plane;
      for (std::size_t p = 0; p < plane; ++p) dst[p] += src[p];
    }
  }
}

void gather_group_output(std::span<const double> grad, std::size_t rows, std::size_t group,
                         std::size_t out_channels, const ConvExtent& e, std::span<double> y) {
  const std::size_t plane = e.out_plane();
  const std::size_t cols_n = e.batch * plane;
  for (std::size_t o = 0; o < rows; ++o) {
    for (std::size_t b = 0; b < e.batch; ++b) {
      const double* src = grad.data() + (b * out_channels + group * rows + o) * plane;
      double* dst = y.data() + o * cols_n + b * plane;
      for (std::size_t p = 0; p < plane; ++p) dst[p] = src[p];
    }
  }
}

}  // namespace kernels
}  // namespace cvnn
