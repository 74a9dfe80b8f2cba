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

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>

namespace cvnn::fft {

namespace {

struct Plans {
  fftw_plan r2c;
  fftw_plan c2r;
};

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

Plans plans_for(std::size_t n) {
  static std::map<std::size_t, Plans> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  if (in == nullptr || out == nullptr) throw std::bad_alloc();
  const int len = static_cast<int>(n);
  Plans p{fftw_plan_dft_r2c_1d(len, in, out, FFTW_ESTIMATE),
          fftw_plan_dft_c2r_1d(len, out, in, FFTW_ESTIMATE)};
  fftw_free(in);
  fftw_free(out);
  if (p.r2c == nullptr || p.c2r == nullptr) {
    throw std::runtime_error("RealFft: FFTW failed to plan length " + std::to_string(n));
  }
  cache.emplace(n, p);
  return p;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw std::invalid_argument("RealFft: length must be >= 2");
  const Plans p = plans_for(n);
  r2c_ = p.r2c;
  c2r_ = p.c2r;
  real_ = fftw_alloc_real(n);
  complex_ = fftw_alloc_complex(n / 2 + 1);
  if (real_ == nullptr || complex_ == nullptr) throw std::bad_alloc();
}

RealFft::~RealFft() {
  fftw_free(real_);
  fftw_free(complex_);
}

void RealFft::forward(const double* in, double* re, double* im) {
  auto* c = static_cast<fftw_complex*>(complex_);
  std::copy(in, in + n_, real_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), real_, c);
  for (std::size_t k = 0; k <= n_ / 2; ++k) {
    re[k] = c[k][0];
    im[k] = c[k][1];
  }
}

void RealFft::inverse(const double* re, const double* im, double* out) {
  auto* c = static_cast<fftw_complex*>(complex_);
  for (std::size_t k = 0; k <= n_ / 2; ++k) {
    c[k][0] = re[k];
    c[k][1] = im[k];
  }
  c[0][1] = 0.0;
  if (n_ % 2 == 0) c[n_ / 2][1] = 0.0;
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), c, real_);
  std::copy(real_, real_ + n_, out);
}

}  // namespace cvnn::fft
