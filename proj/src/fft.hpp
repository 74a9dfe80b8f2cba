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

namespace cvnn::fft {

// Real transforms of one length backed by FFTW. Plans are created once per
// length and shared; each instance owns aligned scratch buffers, so separate
// instances may execute concurrently.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }

  // in[n] -> re[n/2+1], im[n/2+1], unnormalised.
  void forward(const double* in, double* re, double* im);
  // Hermitian half spectrum -> out[n], unnormalised (no 1/n). The imaginary
  // parts of the DC and Nyquist bins are ignored.
  void inverse(const double* re, const double* im, double* out);

 private:
  std::size_t n_;
  void* r2c_;
  void* c2r_;
  double* real_;
  void* complex_;
};

}  // namespace cvnn::fft
