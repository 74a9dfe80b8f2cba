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

// Real-valued dense kernels shared by the execution backends. Private to the
// library.

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

#include "cvnn/conv_geometry.hpp"

namespace cvnn::kernels {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

inline ConstMatMap view(std::span<const double> data, std::size_t rows, std::size_t cols) {
  return ConstMatMap(data.data(), static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(cols));
}

inline MatMap view(std::span<double> data, std::size_t rows, std::size_t cols) {
  return MatMap(data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

// Unfolds group `group` of x [B, C, H, W] into a row-major patch matrix
// [patch_size x B * out_plane]. Row (c * kh + i) * kw + j matches the weight
// layout [out, in / groups, kh, kw].
void im2col(std::span<const double> x, const ConvGeometry& g, const ConvExtent& e,
            std::size_t group, std::span<double> cols);

// Adjoint of im2col: scatters a patch matrix back and adds it into dx.
void col2im_add(std::span<const double> cols, const ConvGeometry& g, const ConvExtent& e,
                std::size_t group, std::span<double> dx);

// out[b, group * rows + o, p] (+)= y[o, b * P + p] for a group's GEMM result
// y [rows x B * P].
void scatter_group_output(std::span<const double> y, std::size_t rows, std::size_t group,
                          std::size_t out_channels, const ConvExtent& e,
                          std::span<double> out);

// Inverse of scatter_group_output: gathers a group's rows of a [B, C, P]
// gradient into a [rows x B * P] matrix.
void gather_group_output(std::span<const double> grad, std::size_t rows, std::size_t group,
                         std::size_t out_channels, const ConvExtent& e, std::span<double> y);

}  // namespace cvnn::kernels
