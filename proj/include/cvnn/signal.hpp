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

// Short-time Fourier analysis and overlap-add synthesis.
//
// Frames are centred: the waveform is reflect-padded by n_fft / 2 on both
// sides, so a signal of T samples yields floor(T / hop) + 1 frames and
// istft returns hop * (frames - 1) samples. The analysis window is a periodic
// Hann of win_length samples placed in the middle of the n_fft frame. The
// forward transform is unnormalised: X[k] = sum_n w[n] x[n] e^{-2 pi i k n / N}.

#pragma once

#include <cstddef>
#include <vector>

#include "cvnn/autograd.hpp"
#include "cvnn/ctensor.hpp"

namespace cvnn {

class StftConfig {
 public:
  // Throws std::invalid_argument unless 0 < hop <= win_length <= n_fft, n_fft
  // is even, and the squared window overlap-adds to an envelope that never
  // vanishes (so synthesis is invertible).
  StftConfig(std::size_t n_fft, std::size_t hop, std::size_t win_length);

  std::size_t n_fft() const { return n_fft_; }
  std::size_t hop() const { return hop_; }
  std::size_t win_length() const { return win_length_; }
  std::size_t bins() const { return n_fft_ / 2 + 1; }
  // n_fft-long window with zeros outside the centred win_length span.
  const std::vector<double>& window() const { return window_; }

  std::size_t frames(std::size_t samples) const { return samples / hop_ + 1; }
  std::size_t samples(std::size_t frames) const { return hop_ * (frames - 1); }

  // True when the window itself overlap-adds to a constant at this hop.
  bool satisfies_cola(double tol = 1e-10) const;

 private:
  std::size_t n_fft_, hop_, win_length_;
  std::vector<double> window_;
};

// wave [T] -> spectrum [frames, bins]. Throws when T < win_length or T is
// too short for reflect padding.
CTensor stft(const StftConfig& cfg, const RTensor& wave);
// spectrum [frames, bins] -> wave [hop * (frames - 1)].
RTensor istft(const StftConfig& cfg, const CTensor& spec);

// Differentiable forms. stft reads the real plane of a [T] tensor; istft
// emits a real [hop * (frames - 1)] tensor.
Var stft(Var wave, const StftConfig& cfg);
Var istft(Var spec, const StftConfig& cfg);

// HTK-scale triangular filters over the one-sided spectrum.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t n_mels, std::size_t n_fft, double sample_rate, double f_min,
                double f_max);

  static double hz_to_mel(double hz);
  static double mel_to_hz(double mel);

  std::size_t n_mels() const { return n_mels_; }
  std::size_t bins() const { return bins_; }
  double sample_rate() const { return sample_rate_; }
  // Centre frequency (Hz) of filter m.
  double center_hz(std::size_t m) const { return edges_hz_.at(m + 1); }
  // Weights [n_mels, bins], row-major.
  const RTensor& weights() const { return weights_; }

 private:
  std::size_t n_mels_, bins_;
  double sample_rate_;
  std::vector<double> edges_hz_;
  RTensor weights_;
};

inline constexpr double kLogMelFloor = 1e-7;

// log(max(fb |X|, 1e-7)) -> [frames, n_mels]. Magnitude, not power.
RTensor log_mel(const StftConfig& cfg, const MelFilterbank& fb, const RTensor& wave);
Var log_mel(Var wave, const StftConfig& cfg, const MelFilterbank& fb);

struct StftResolution {
  std::size_t n_fft, hop, win_length;
};

std::vector<StftResolution> default_mr_stft_resolutions();

// Mean over resolutions of spectral convergence ||M_b - M_a||_F / ||M_a||_F
// plus mean |log M_a - log M_b|, with M = sqrt(max(|X|^2, 1e-7)). `reference`
// is the target signal. Throws on length mismatch.
double mr_stft_error(const RTensor& reference, const RTensor& estimate,
                     const std::vector<StftResolution>& resolutions =
                         default_mr_stft_resolutions());

}  // namespace cvnn
