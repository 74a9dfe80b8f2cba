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

#pragma once

#include <cstddef>

#include "cvnn/ctensor.hpp"

namespace cvnn {

// Cross-correlation geometry. A 1-D convolution is the special case
// kernel_h = 1, stride_h = 1, pad_h = 0, dilation_h = 1 over inputs of height 1.
struct ConvGeometry {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  std::size_t pad_h = 0;
  std::size_t pad_w = 0;
  std::size_t dilation_h = 1;
  std::size_t dilation_w = 1;
  std::size_t groups = 1;

  static ConvGeometry conv1d(std::size_t in, std::size_t out, std::size_t kernel,
                             std::size_t stride = 1, std::size_t pad = 0,
                             std::size_t dilation = 1, std::size_t groups = 1);

  // Throws std::invalid_argument for zero extents or groups not dividing
  // the channel counts.
  void validate() const;

  std::size_t group_in() const { return in_channels / groups; }
  std::size_t group_out() const { return out_channels / groups; }
  // Rows of one group's patch matrix: group_in * kernel_h * kernel_w.
  std::size_t patch_size() const { return group_in() * kernel_h * kernel_w; }

  // Weight tensor shape [out, in / groups, kh, kw] (or [out, in / groups, k] for 1-D).
  Shape weight_shape(bool one_d) const;
};

// Resolved extents of one convolution call.
struct ConvExtent {
  std::size_t batch = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t out_h = 0;
  std::size_t out_w = 0;

  std::size_t in_plane() const { return height * width; }
  std::size_t out_plane() const { return out_h * out_w; }
};

// floor((n + 2 pad - dilation (k - 1) - 1) / stride) + 1; throws when the
// padded input is shorter than the dilated kernel.
std::size_t conv_output_length(std::size_t n, std::size_t kernel, std::size_t stride,
                               std::size_t pad, std::size_t dilation);

// Input is [B, C, L] when one_d, else [B, C, H, W].
ConvExtent conv_extent(const ConvGeometry& g, const Shape& input, bool one_d);

Shape conv_output_shape(const ConvGeometry& g, const ConvExtent& e, bool one_d);

}  // namespace cvnn
