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

// Independent reference implementations used by the tests. None of these
// call into the library's kernels: they are written with std::complex and
// plain loops so that a bug in the library cannot hide in its own oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "cvnn/conv_geometry.hpp"
#include "cvnn/ctensor.hpp"

namespace cvnn::oracle {

using cd = std::complex<double>;

inline CTensor random_ctensor(const Shape& shape, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CTensor t(shape);
  for (double& v : t.real()) v = u(rng);
  for (double& v : t.imag()) v = u(rng);
  return t;
}

inline RTensor random_rtensor(const Shape& shape, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RTensor t(shape);
  for (double& v : t.data()) v = u(rng);
  return t;
}

// |a - n| / max(1, |a|, |n|).
inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

// Central differences of f with respect to every entry of `values`, which
// must alias storage that f reads.
inline std::vector<double> numeric_gradient(const std::function<double()>& f,
                                            std::span<double> values, double h = 1e-5) {
  std::vector<double> g(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double saved = values[k];
    values[k] = saved + h;
    const double up = f();
    values[k] = saved - h;
    const double down = f();
    values[k] = saved;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

// Largest rel_error between an analytic gradient and central differences.
inline double max_gradient_error(const std::function<double()>& f, std::span<double> values,
                                 std::span<const double> analytic, double h = 1e-5) {
  const std::vector<double> numeric = numeric_gradient(f, values, h);
  double worst = 0.0;
  for (std::size_t k = 0; k < numeric.size(); ++k) {
    worst = std::max(worst, rel_error(analytic[k], numeric[k]));
  }
  return worst;
}

// Schoolbook complex product: out[r, o] = sum_i W[o, i] z[r, i] (+ b[o]).
inline CTensor linear(const CTensor& z, const CTensor& w, const CTensor* bias) {
  const std::size_t in = w.shape()[1], out = w.shape()[0], rows = z.numel() / in;
  std::vector<std::size_t> dims = z.shape().dims();
  dims.back() = out;
  CTensor y{Shape(dims)};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t o = 0; o < out; ++o) {
      cd acc = bias ? bias->at(o) : cd{};
      for (std::size_t i = 0; i < in; ++i) acc += w.at(o * in + i) * z.at(r * in + i);
      y.set(r * out + o, acc);
    }
  }
  return y;
}

// Direct complex cross-correlation over [B, C, H, W] (or [B, C, L] when one_d).
inline CTensor conv(const CTensor& x, const CTensor& w, const CTensor* bias, const ConvGeometry& g,
                    bool one_d) {
  const std::size_t batch = x.shape()[0];
  const std::size_t h = one_d ? 1 : x.shape()[2];
  const std::size_t wd = one_d ? x.shape()[2] : x.shape()[3];
  const std::size_t oh = (h + 2 * g.pad_h - g.dilation_h * (g.kernel_h - 1) - 1) / g.stride_h + 1;
  const std::size_t ow = (wd + 2 * g.pad_w - g.dilation_w * (g.kernel_w - 1) - 1) / g.stride_w + 1;
  const std::size_t cin_g = g.in_channels / g.groups, cout_g = g.out_channels / g.groups;
  CTensor y(one_d ? Shape{batch, g.out_channels, ow} : Shape{batch, g.out_channels, oh, ow});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < g.out_channels; ++o) {
      const std::size_t grp = o / cout_g;
      for (std::size_t i = 0; i < oh; ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
          cd acc = bias ? bias->at(o) : cd{};
          for (std::size_t c = 0; c < cin_g; ++c) {
            const std::size_t ch = grp * cin_g + c;
            for (std::size_t ki = 0; ki < g.kernel_h; ++ki) {
              for (std::size_t kj = 0; kj < g.kernel_w; ++kj) {
                const long ii = static_cast<long>(i * g.stride_h + ki * g.dilation_h) -
                                static_cast<long>(g.pad_h);
                const long jj = static_cast<long>(j * g.stride_w + kj * g.dilation_w) -
                                static_cast<long>(g.pad_w);
                if (ii < 0 || jj < 0 || ii >= static_cast<long>(h) ||
                    jj >= static_cast<long>(wd)) {
                  continue;
                }
                const std::size_t xi =
                    ((b * g.in_channels + ch) * h + static_cast<std::size_t>(ii)) * wd +
                    static_cast<std::size_t>(jj);
                const std::size_t wi = ((o * cin_g + c) * g.kernel_h + ki) * g.kernel_w + kj;
                acc += w.at(wi) * x.at(xi);
              }
            }
          }
          y.set(((b * g.out_channels + o) * oh + i) * ow + j, acc);
        }
      }
    }
  }
  return y;
}

// O(N^2) DFT, X[k] = sum_n x[n] e^{-2 pi i k n / N}.
inline std::vector<cd> dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                         static_cast<double>(n);
      acc += x[t] * cd(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace cvnn::oracle
