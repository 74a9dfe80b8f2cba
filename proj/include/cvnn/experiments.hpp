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

// Toy GAN on a synthetic complex distribution (complex-valued versus
// real-valued networks) and a small iSTFT vocoder trained to overfit a
// single waveform.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "cvnn/ctensor.hpp"
#include "cvnn/layers.hpp"

namespace cvnn {

// Archimedean spiral z = (a + b t) e^{i t} + noise with t ~ U[0, 2 pi turns]
// and independent N(0, sigma^2) noise on each component. The defaults put the
// outer end of the curve at radius 1 and use sigma = 0.05 of that radius.
struct SpiralConfig {
  std::size_t n_samples = 10000;
  double turns = 2.0;
  double a = 0.1;
  double b = 0.9 / (4.0 * std::numbers::pi);
  double sigma = 0.05;
  std::uint64_t seed = 0;

  double max_radius() const;
  void validate() const;
};

// Noise-free curve point at parameter t.
std::complex<double> spiral_point(const SpiralConfig& cfg, double t);
// [n_samples] draws; a pure function of cfg.
CTensor sample_target(const SpiralConfig& cfg);

enum class GanMode { Cvnn, Rvnn };
std::string_view to_string(GanMode mode);

struct GanConfig {
  GanMode mode = GanMode::Cvnn;
  std::size_t complex_hidden = 128;  // RVNN layers are twice as wide
  std::size_t depth = 4;             // linear layers per network
  double leaky_slope = 0.2;
  std::size_t steps = 2000;  // sized so 10 seeds of both modes fit in 30 CPU minutes
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::size_t batch = 128;
  std::size_t eval_samples = 10000;
  std::size_t log_every = 50;
  std::uint64_t seed = 0;
  Backend backend = Backend::Block;

  // Width of each hidden layer in this mode's own units.
  std::size_t hidden() const { return mode == GanMode::Cvnn ? complex_hidden : 2 * complex_hidden; }
  // Bytes held by one hidden activation vector per sample.
  std::size_t hidden_activation_bytes() const;
  void validate() const;
};

// True when everything except mode and seed matches, i.e. the two runs use
// identical optimisation hyperparameters.
bool same_optimization(const GanConfig& a, const GanConfig& b);

struct RunReport {
  GanMode mode = GanMode::Cvnn;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  bool failed = false;
  std::string failure;
  double jsd_mag = 0.0;
  double jsd_phase = 0.0;
  std::size_t generator_parameters = 0;  // real scalars
  std::vector<std::size_t> logged_steps;
  std::vector<double> d_loss;
  std::vector<double> g_loss;
  CTensor samples;  // generated, [eval_samples]
  double seconds = 0.0;
};

// JSD between magnitude and phase marginals of `generated` and `target`.
void score_samples(const CTensor& generated, const CTensor& target, RunReport& report);

RunReport train_toy_gan(const GanConfig& cfg, const CTensor& target);

struct MiniVocoderConfig {
  std::size_t layers = 2;
  std::size_t dim = 32;
  std::size_t n_fft = 1024;
  std::size_t hop = 256;
  std::size_t win_length = 1024;
  std::size_t n_mels = 100;
  double sample_rate = 24000.0;
  double f_max = 12000.0;
  std::size_t steps = 2000;
  double lr = 1e-2;
  // The learning rate falls from lr to lr_final on a cosine in log space.
  double lr_final = 1e-6;
  int pq_levels = 0;
  std::size_t wave_samples = 24064;
  std::uint64_t seed = 0;
  Backend backend = Backend::Block;

  void validate() const;
};

// Sum of three sinusoids (220, 550 and 1230 Hz) with a slow amplitude
// envelope, peak amplitude below 0.6.
RTensor default_vocoder_signal(const MiniVocoderConfig& cfg);

struct VocoderReport {
  std::vector<double> loss;  // mel-L1 before each step, plus the final value
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double mr_stft = 0.0;
  bool diverged = false;
  RTensor waveform;
  double seconds = 0.0;
};

VocoderReport mini_vocoder_overfit(const MiniVocoderConfig& cfg, const RTensor& wave);

}  // namespace cvnn
