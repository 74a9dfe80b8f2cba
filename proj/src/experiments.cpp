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

#include "cvnn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cvnn/losses.hpp"
#include "cvnn/models.hpp"
#include "cvnn/signal.hpp"

namespace cvnn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Independent streams derived from one user seed.
Rng stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return Rng(seq);
}

enum Salt : std::uint64_t { kTarget = 1, kInit = 2, kData = 3, kEval = 4 };

}  // namespace

// ---- spiral target ----------------------------------------------------------------

double SpiralConfig::max_radius() const { return a + b * 2.0 * std::numbers::pi * turns; }

void SpiralConfig::validate() const {
  if (n_samples < 1000) throw std::invalid_argument("SpiralConfig: n_samples must be >= 1000");
  if (!(sigma >= 0.0)) throw std::invalid_argument("SpiralConfig: sigma must be >= 0");
  if (!(turns > 0.0)) throw std::invalid_argument("SpiralConfig: turns must be positive");
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("SpiralConfig: a and b must be >= 0");
}

std::complex<double> spiral_point(const SpiralConfig& cfg, double t) {
  return std::polar(cfg.a + cfg.b * t, t);
}

CTensor sample_target(const SpiralConfig& cfg) {
  cfg.validate();
  Rng rng = stream(cfg.seed, kTarget);
  std::uniform_real_distribution<double> param(0.0, 2.0 * std::numbers::pi * cfg.turns);
  std::normal_distribution<double> noise(0.0, 1.0);
  CTensor out(Shape{cfg.n_samples});
  for (std::size_t k = 0; k < cfg.n_samples; ++k) {
    const std::complex<double> p = spiral_point(cfg, param(rng));
    const double nx = noise(rng), ny = noise(rng);
    out.set(k, p + std::complex<double>(cfg.sigma * nx, cfg.sigma * ny));
  }
  return out;
}

// ---- toy GAN ------------------------------------------------------------------------

std::string_view to_string(GanMode mode) { return mode == GanMode::Cvnn ? "cvnn" : "rvnn"; }

std::size_t GanConfig::hidden_activation_bytes() const {
  // A complex activation holds two doubles.
  return mode == GanMode::Cvnn ? hidden() * 2 * sizeof(double) : hidden() * sizeof(double);
}

void GanConfig::validate() const {
  if (complex_hidden == 0 || depth < 2) throw std::invalid_argument("GanConfig: bad architecture");
  if (batch == 0) throw std::invalid_argument("GanConfig: batch must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("GanConfig: lr must be positive");
  if (eval_samples < 100) throw std::invalid_argument("GanConfig: eval_samples must be >= 100");
  if (log_every == 0) throw std::invalid_argument("GanConfig: log_every must be positive");
}

bool same_optimization(const GanConfig& a, const GanConfig& b) {
  return a.complex_hidden == b.complex_hidden && a.depth == b.depth &&
         a.leaky_slope == b.leaky_slope && a.steps == b.steps && a.lr == b.lr &&
         a.beta1 == b.beta1 && a.beta2 == b.beta2 && a.batch == b.batch &&
         a.eval_samples == b.eval_samples;
}

void score_samples(const CTensor& generated, const CTensor& target, RunReport& report) {
  const Polar g = polar_decompose(generated);
  const Polar t = polar_decompose(target);
  report.jsd_mag = jsd_1d(g.magnitude.data(), t.magnitude.data());
  report.jsd_phase = jsd_1d(g.phase.data(), t.phase.data());
}

namespace {

// Both networks of one mode behind a common interface. Complex samples enter
// the CVNN as [B, 1] complex and the RVNN as [B, 2] real (re, im).
class ToyGan {
 public:
  ToyGan(const GanConfig& cfg, Rng& rng) : cfg_(cfg) {
    const std::size_t h = cfg.hidden();
    const bool complex = cfg.mode == GanMode::Cvnn;
    const std::size_t io = complex ? 1 : 2;
    std::vector<std::size_t> g_widths{io}, d_widths{io};
    for (std::size_t i = 0; i + 1 < cfg.depth; ++i) {
      g_widths.push_back(h);
      d_widths.push_back(h);
    }
    g_widths.push_back(io);
    d_widths.push_back(1);
    if (complex) {
      cg_ = std::make_unique<ComplexMlp>("gen", g_widths, cfg.leaky_slope, rng, cfg.backend);
      cd_ = std::make_unique<ComplexMlp>("disc", d_widths, cfg.leaky_slope, rng, cfg.backend);
    } else {
      rg_ = std::make_unique<RealMlp>("gen", g_widths, cfg.leaky_slope, rng);
      rd_ = std::make_unique<RealMlp>("disc", d_widths, cfg.leaky_slope, rng);
    }
  }

  bool complex() const { return cfg_.mode == GanMode::Cvnn; }

  Var generate(Tape& t, Var latent) { return complex() ? cg_->forward(t, latent) : rg_->forward(t, latent); }
  // Real logit [B, 1]: the real part of the complex discriminator output.
  Var logit(Tape& t, Var x) {
    return complex() ? real_part(cd_->forward(t, x)) : rd_->forward(t, x);
  }

  std::vector<Parameter*> g_params() { return complex() ? cg_->parameters() : rg_->parameters(); }
  std::vector<Parameter*> d_params() { return complex() ? cd_->parameters() : rd_->parameters(); }

  // Complex samples -> network input.
  CTensor encode(const std::vector<std::complex<double>>& z) const {
    const std::size_t n = z.size();
    if (complex()) return CTensor::from_values(Shape{n, 1}, z);
    CTensor x(Shape{n, 2});
    for (std::size_t i = 0; i < n; ++i) {
      x.real()[2 * i] = z[i].real();
      x.real()[2 * i + 1] = z[i].imag();
    }
    return x;
  }

  // Generator output -> complex samples appended to `out`.
  void decode(const CTensor& y, std::vector<std::complex<double>>& out) const {
    const std::size_t n = y.shape()[0];
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(complex() ? y.at(i)
                              : std::complex<double>(y.real()[2 * i], y.real()[2 * i + 1]));
    }
  }

 private:
  GanConfig cfg_;
  std::unique_ptr<ComplexMlp> cg_, cd_;
  std::unique_ptr<RealMlp> rg_, rd_;
};

std::vector<std::complex<double>> draw_latent(Rng& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::complex<double>> z(n);
  for (auto& v : z) {
    const double re = normal(rng);
    const double im = normal(rng);
    v = {re, im};
  }
  return z;
}

CTensor generate_samples(ToyGan& gan, std::uint64_t seed, std::size_t n) {
  Rng rng = stream(seed, kEval);
  std::vector<std::complex<double>> out;
  out.reserve(n);
  constexpr std::size_t kChunk = 2048;
  for (std::size_t done = 0; done < n; done += kChunk) {
    const std::size_t m = std::min(kChunk, n - done);
    Tape t;
    Var y = gan.generate(t, t.constant(gan.encode(draw_latent(rng, m))));
    gan.decode(y.value(), out);
  }
  return CTensor::from_values(Shape{n}, out);
}

}  // namespace

RunReport train_toy_gan(const GanConfig& cfg, const CTensor& target) {
  cfg.validate();
  if (target.shape().rank() != 1 || target.numel() < 100) {
    throw std::invalid_argument("train_toy_gan: target must be a 1-D tensor of >= 100 samples");
  }
  const auto start = Clock::now();
  RunReport report;
  report.mode = cfg.mode;
  report.seed = cfg.seed;

  Rng init = stream(cfg.seed, kInit);
  ToyGan gan(cfg, init);
  report.generator_parameters = count_scalars(gan.g_params(), gan.complex());

  const Adam::Options opt{cfg.lr, cfg.beta1, cfg.beta2, 1e-8};
  Adam g_opt(gan.g_params(), opt);
  Adam d_opt(gan.d_params(), opt);
  Rng data = stream(cfg.seed, kData);
  std::uniform_int_distribution<std::size_t> pick(0, target.numel() - 1);
  std::vector<std::complex<double>> real(cfg.batch);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    for (auto& v : real) v = target.at(pick(data));
    const std::vector<std::complex<double>> latent = draw_latent(data, cfg.batch);

    // The generator forward is recorded once and reused for its own update.
    Tape gt;
    Var fake = gan.generate(gt, gt.constant(gan.encode(latent)));

    Tape dt;
    Var d_real = gan.logit(dt, dt.constant(gan.encode(real)));
    Var d_fake = gan.logit(dt, dt.constant(fake.value()));
    Var d_loss = add(bce_with_logits(d_real, true), bce_with_logits(d_fake, false));
    d_opt.zero_grad();
    dt.backward(d_loss);
    d_opt.step();

    Var g_loss = bce_with_logits(gan.logit(gt, fake), true);
    g_opt.zero_grad();
    gt.backward(g_loss);
    g_opt.step();

    const double dl = d_loss.value().real()[0];
    const double gl = g_loss.value().real()[0];
    if (!std::isfinite(dl) || !std::isfinite(gl)) {
      report.failed = true;
      report.failure = "non-finite loss at step " + std::to_string(step);
      report.steps = step;
      report.seconds = seconds_since(start);
      return report;
    }
    if (step % cfg.log_every == 0 || step + 1 == cfg.steps) {
      report.logged_steps.push_back(step);
      report.d_loss.push_back(dl);
      report.g_loss.push_back(gl);
    }
  }
  report.steps = cfg.steps;
  report.samples = generate_samples(gan, cfg.seed, cfg.eval_samples);
  if (!report.samples.all_finite()) {
    report.failed = true;
    report.failure = "generator produced non-finite samples";
  } else {
    score_samples(report.samples, target, report);
  }
  report.seconds = seconds_since(start);
  return report;
}

// ---- mini vocoder --------------------------------------------------------------------

void MiniVocoderConfig::validate() const {
  if (layers == 0 || dim < 2 || n_mels == 0) {
    throw std::invalid_argument("MiniVocoderConfig: layers, dim and n_mels must be positive");
  }
  if (!(lr > 0.0) || !(lr_final > 0.0)) {
    throw std::invalid_argument("MiniVocoderConfig: learning rates must be positive");
  }
  if (pq_levels < 0) throw std::invalid_argument("MiniVocoderConfig: pq_levels must be >= 0");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("MiniVocoderConfig: bad sample rate");
}

RTensor default_vocoder_signal(const MiniVocoderConfig& cfg) {
  RTensor wave(Shape{cfg.wave_samples});
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (std::size_t n = 0; n < cfg.wave_samples; ++n) {
    const double t = static_cast<double>(n) / cfg.sample_rate;
    const double env = 0.8 + 0.2 * std::sin(kTwoPi * 1.5 * t);
    wave[n] = env * (0.25 * std::sin(kTwoPi * 220.0 * t) +
                     0.20 * std::sin(kTwoPi * 550.0 * t + 0.3) +
                     0.12 * std::sin(kTwoPi * 1230.0 * t + 1.1));
  }
  return wave;
}

VocoderReport mini_vocoder_overfit(const MiniVocoderConfig& cfg, const RTensor& wave) {
  cfg.validate();
  const auto start = Clock::now();
  const StftConfig stft_cfg(cfg.n_fft, cfg.hop, cfg.win_length);
  const MelFilterbank fb(cfg.n_mels, cfg.n_fft, cfg.sample_rate, 0.0, cfg.f_max);

  // Synthesis returns hop * (frames - 1) samples, so train on that prefix.
  const std::size_t usable = (wave.numel() / cfg.hop) * cfg.hop;
  if (usable < cfg.win_length) throw std::invalid_argument("mini_vocoder_overfit: wave too short");
  RTensor target(Shape{usable},
                 std::vector<double>(wave.data().begin(), wave.data().begin() + usable));
  const RTensor mel = log_mel(stft_cfg, fb, target);  // [frames, n_mels]
  const std::size_t frames = mel.shape()[0];
  // Standardised log-mel features keep the stem's pre-activations near unit scale.
  double mu = 0.0, var = 0.0;
  for (double v : mel.data()) mu += v / static_cast<double>(mel.numel());
  for (double v : mel.data()) var += (v - mu) * (v - mu) / static_cast<double>(mel.numel());
  const double sd = std::sqrt(var) > 0.0 ? std::sqrt(var) : 1.0;
  CTensor features(Shape{1, cfg.n_mels, frames});
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      features.real()[m * frames + f] = (mel[f * cfg.n_mels + m] - mu) / sd;
    }
  }

  Rng init = stream(cfg.seed, kInit);
  GeneratorShape shape;
  shape.in_channels = cfg.n_mels;
  shape.dim = cfg.dim;
  shape.layers = cfg.layers;
  shape.bins = stft_cfg.bins();
  shape.pq_levels = cfg.pq_levels;
  ComplexGenerator gen(shape, init, cfg.backend);
  Adam opt(gen.parameters(), Adam::Options{cfg.lr, 0.8, 0.9, 1e-8});

  VocoderReport report;
  for (std::size_t step = 0;; ++step) {
    Tape t;
    Var spec = gen.forward(t, t.constant(features));
    Var audio = istft(spec, stft_cfg);
    Var loss = l1_loss(log_mel(audio, stft_cfg, fb), t.constant(CTensor::from_real(mel)));
    const double value = loss.value().real()[0];
    report.loss.push_back(value);
    if (!std::isfinite(value)) {
      report.diverged = true;
      break;
    }
    if (step == cfg.steps) {
      report.waveform = audio.value().real_part();
      break;
    }
    opt.zero_grad();
    t.backward(loss);
    // Cosine schedule on log(lr): long at the top, then a steep fall so the
    // last steps can settle near-silent bins below the log floor's reach.
    const double progress = static_cast<double>(step) / static_cast<double>(cfg.steps);
    const double mix = 0.5 * (1.0 - std::cos(std::numbers::pi * progress));
    opt.set_lr(cfg.lr * std::pow(cfg.lr_final / cfg.lr, mix));
    opt.step();
  }
  report.initial_loss = report.loss.front();
  report.final_loss = report.loss.back();
  if (!report.diverged) report.mr_stft = mr_stft_error(target, report.waveform);
  report.seconds = seconds_since(start);
  return report;
}

}  // namespace cvnn
