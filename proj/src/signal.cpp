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

#include "cvnn/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace cvnn {

StftConfig::StftConfig(std::size_t n_fft, std::size_t hop, std::size_t win_length)
    : n_fft_(n_fft), hop_(hop), win_length_(win_length), window_(n_fft, 0.0) {
  if (hop == 0 || hop > win_length || win_length > n_fft) {
    throw std::invalid_argument("StftConfig: need 0 < hop <= win_length <= n_fft, got n_fft=" +
                                std::to_string(n_fft) + " hop=" + std::to_string(hop) +
                                " win_length=" + std::to_string(win_length));
  }
  if (n_fft < 2 || n_fft % 2 != 0) throw std::invalid_argument("StftConfig: n_fft must be even");
  const std::size_t offset = (n_fft - win_length) / 2;
  for (std::size_t n = 0; n < win_length; ++n) {
    window_[offset + n] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                             static_cast<double>(win_length));
  }
  // Synthesis divides by the overlap-added squared window, so it must not
  // vanish anywhere in steady state.
  std::vector<double> env(hop, 0.0);
  for (std::size_t n = 0; n < n_fft; ++n) env[n % hop] += window_[n] * window_[n];
  const auto [lo, hi] = std::minmax_element(env.begin(), env.end());
  if (!(*lo > 1e-10 * *hi)) {
    throw std::invalid_argument("StftConfig: hop " + std::to_string(hop) +
                                " leaves gaps in the squared-window envelope; synthesis is not "
                                "invertible");
  }
}

bool StftConfig::satisfies_cola(double tol) const {
  std::vector<double> env(hop_, 0.0);
  for (std::size_t n = 0; n < n_fft_; ++n) env[n % hop_] += window_[n];
  const auto [lo, hi] = std::minmax_element(env.begin(), env.end());
  return *hi - *lo <= tol * *hi;
}

namespace {

std::size_t pad_of(const StftConfig& cfg) { return cfg.n_fft() / 2; }

void check_wave_length(const StftConfig& cfg, std::size_t length) {
  if (length < cfg.win_length() || length <= pad_of(cfg)) {
    throw std::invalid_argument("stft: waveform of " + std::to_string(length) +
                                " samples is shorter than the window (" +
                                std::to_string(std::max(cfg.win_length(), pad_of(cfg) + 1)) +
                                " needed)");
  }
}

// Index into the unpadded signal for position j of the reflect-padded one.
std::size_t reflect_index(std::ptrdiff_t j, std::size_t length) {
  const auto n = static_cast<std::ptrdiff_t>(length);
  if (j < 0) j = -j;
  if (j >= n) j = 2 * (n - 1) - j;
  return static_cast<std::size_t>(j);
}

void check_spectrum(const StftConfig& cfg, const Shape& shape) {
  if (shape.rank() != 2 || shape[1] != cfg.bins() || shape[0] < 2) {
    throw std::invalid_argument("istft: expected spectrum [frames >= 2, " +
                                std::to_string(cfg.bins()) + "], got " + shape.str());
  }
}

// Overlap-added squared window over the padded signal.
std::vector<double> synthesis_envelope(const StftConfig& cfg, std::size_t frames) {
  const std::size_t n = cfg.n_fft();
  std::vector<double> env(n + cfg.hop() * (frames - 1), 0.0);
  const auto& w = cfg.window();
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t i = 0; i < n; ++i) env[f * cfg.hop() + i] += w[i] * w[i];
  }
  return env;
}

}  // namespace

CTensor stft(const StftConfig& cfg, const RTensor& wave) {
  if (wave.shape().rank() != 1) throw std::invalid_argument("stft: expected a 1-D waveform");
  const std::size_t length = wave.numel();
  check_wave_length(cfg, length);
  const std::size_t n = cfg.n_fft(), bins = cfg.bins(), frames = cfg.frames(length);
  const auto pad = static_cast<std::ptrdiff_t>(pad_of(cfg));
  const auto& w = cfg.window();
  fft::RealFft fft(n);
  std::vector<double> frame(n);
  CTensor out(Shape{frames, bins});
  for (std::size_t f = 0; f < frames; ++f) {
    const auto start = static_cast<std::ptrdiff_t>(f * cfg.hop()) - pad;
    for (std::size_t i = 0; i < n; ++i) {
      frame[i] = w[i] * wave[reflect_index(start + static_cast<std::ptrdiff_t>(i), length)];
    }
    fft.forward(frame.data(), out.real().data() + f * bins, out.imag().data() + f * bins);
  }
  return out;
}

RTensor istft(const StftConfig& cfg, const CTensor& spec) {
  check_spectrum(cfg, spec.shape());
  const std::size_t n = cfg.n_fft(), bins = cfg.bins(), frames = spec.shape()[0];
  const std::size_t pad = pad_of(cfg), length = cfg.samples(frames);
  const auto& w = cfg.window();
  const std::vector<double> env = synthesis_envelope(cfg, frames);
  std::vector<double> acc(env.size(), 0.0), frame(n);
  fft::RealFft fft(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t f = 0; f < frames; ++f) {
    fft.inverse(spec.real().data() + f * bins, spec.imag().data() + f * bins, frame.data());
    for (std::size_t i = 0; i < n; ++i) acc[f * cfg.hop() + i] += w[i] * frame[i] * inv_n;
  }
  RTensor out(Shape{length});
  for (std::size_t i = 0; i < length; ++i) {
    const double e = env[pad + i];
    out[i] = e > 1e-11 ? acc[pad + i] / e : 0.0;
  }
  return out;
}

Var stft(Var wave, const StftConfig& cfg) {
  const std::size_t length = wave.value().numel();
  CTensor out = stft(cfg, wave.value().real_part().reshaped(Shape{length}));
  const int iw = wave.id();
  return wave.tape().record(OpKind::Stft, {wave}, std::move(out), [iw, cfg](Tape& t,
                                                                           const GradPair& g) {
    const std::size_t length = t.value(iw).numel();
    const std::size_t n = cfg.n_fft(), bins = cfg.bins(), frames = cfg.frames(length);
    const auto pad = static_cast<std::ptrdiff_t>(pad_of(cfg));
    const auto& w = cfg.window();
    fft::RealFft fft(n);
    // Adjoint of the one-sided real DFT: ds[n] = sum_k Re(G_k e^{+2 pi i k n / N})
    // over the kept bins, which is a c2r transform of G with interior bins halved.
    std::vector<double> re(bins), im(bins), ds(n);
    GradPair& gw = t.grad_buffer(iw);
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || k == bins - 1;
        re[k] = edge ? g.g_r[f * bins + k] : 0.5 * g.g_r[f * bins + k];
        im[k] = edge ? 0.0 : 0.5 * g.g_i[f * bins + k];
      }
      fft.inverse(re.data(), im.data(), ds.data());
      const auto start = static_cast<std::ptrdiff_t>(f * cfg.hop()) - pad;
      for (std::size_t i = 0; i < n; ++i) {
        gw.g_r[reflect_index(start + static_cast<std::ptrdiff_t>(i), length)] += w[i] * ds[i];
      }
    }
  });
}

Var istft(Var spec, const StftConfig& cfg) {
  RTensor wave = istft(cfg, spec.value());
  const int is = spec.id();
  return spec.tape().record(
      OpKind::Istft, {spec}, CTensor::from_real(wave), [is, cfg](Tape& t, const GradPair& g) {
        const std::size_t frames = t.value(is).shape()[0];
        const std::size_t n = cfg.n_fft(), bins = cfg.bins(), pad = pad_of(cfg);
        const std::size_t length = cfg.samples(frames);
        const auto& w = cfg.window();
        const std::vector<double> env = synthesis_envelope(cfg, frames);
        // Gradient w.r.t. the padded overlap-add buffer.
        std::vector<double> gacc(env.size(), 0.0);
        for (std::size_t i = 0; i < length; ++i) {
          const double e = env[pad + i];
          if (e > 1e-11) gacc[pad + i] = g.g_r[i] / e;
        }
        fft::RealFft fft(n);
        std::vector<double> frame(n), re(bins), im(bins);
        const double inv_n = 1.0 / static_cast<double>(n);
        GradPair& gs = t.grad_buffer(is);
        for (std::size_t f = 0; f < frames; ++f) {
          for (std::size_t i = 0; i < n; ++i) frame[i] = w[i] * gacc[f * cfg.hop() + i];
          fft.forward(frame.data(), re.data(), im.data());
          for (std::size_t k = 0; k < bins; ++k) {
            const bool edge = k == 0 || k == bins - 1;
            const double c = (edge ? 1.0 : 2.0) * inv_n;
            gs.g_r[f * bins + k] += c * re[k];
            if (!edge) gs.g_i[f * bins + k] += c * im[k];
          }
        }
      });
}

// ---- mel ------------------------------------------------------------------------

double MelFilterbank::hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelFilterbank::mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank::MelFilterbank(std::size_t n_mels, std::size_t n_fft, double sample_rate,
                             double f_min, double f_max)
    : n_mels_(n_mels), bins_(n_fft / 2 + 1), sample_rate_(sample_rate) {
  if (n_mels == 0 || n_fft < 2) throw std::invalid_argument("MelFilterbank: empty filterbank");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw std::invalid_argument("MelFilterbank: need 0 <= f_min < f_max <= sample_rate / 2");
  }
  const double m_lo = hz_to_mel(f_min), m_hi = hz_to_mel(f_max);
  edges_hz_.resize(n_mels + 2);
  for (std::size_t i = 0; i < n_mels + 2; ++i) {
    edges_hz_[i] = mel_to_hz(m_lo + (m_hi - m_lo) * static_cast<double>(i) /
                                        static_cast<double>(n_mels + 1));
  }
  weights_ = RTensor(Shape{n_mels, bins_});
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges_hz_[m], mid = edges_hz_[m + 1], hi = edges_hz_[m + 2];
    double support = 0.0;
    for (std::size_t k = 0; k < bins_; ++k) {
      const double f = sample_rate * static_cast<double>(k) / static_cast<double>(n_fft);
      const double up = (f - lo) / (mid - lo);
      const double down = (hi - f) / (hi - mid);
      const double v = std::max(0.0, std::min(up, down));
      weights_[m * bins_ + k] = v;
      support += v;
    }
    if (support == 0.0) {
      throw std::invalid_argument("MelFilterbank: filter " + std::to_string(m) +
                                  " covers no FFT bin; use fewer mels or a larger n_fft");
    }
  }
}

RTensor log_mel(const StftConfig& cfg, const MelFilterbank& fb, const RTensor& wave) {
  if (fb.bins() != cfg.bins()) throw std::invalid_argument("log_mel: filterbank/STFT mismatch");
  const CTensor spec = stft(cfg, wave);
  const std::size_t frames = spec.shape()[0], bins = cfg.bins(), mels = fb.n_mels();
  const auto& w = fb.weights();
  RTensor out(Shape{frames, mels});
  std::vector<double> mag(bins);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t k = 0; k < bins; ++k) {
      mag[k] = std::hypot(spec.real()[f * bins + k], spec.imag()[f * bins + k]);
    }
    for (std::size_t m = 0; m < mels; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < bins; ++k) acc += w[m * bins + k] * mag[k];
      out[f * mels + m] = std::log(std::max(acc, kLogMelFloor));
    }
  }
  return out;
}

Var log_mel(Var wave, const StftConfig& cfg, const MelFilterbank& fb) {
  if (fb.bins() != cfg.bins()) throw std::invalid_argument("log_mel: filterbank/STFT mismatch");
  Var spec = stft(wave, cfg);
  Var mag = magnitude(spec);
  Var filters = wave.tape().constant(CTensor::from_real(fb.weights()));
  return log_clamp(matmul_nt(mag, filters), kLogMelFloor);
}

// ---- multi-resolution STFT error --------------------------------------------------

std::vector<StftResolution> default_mr_stft_resolutions() {
  return {{512, 128, 512}, {1024, 256, 1024}, {2048, 512, 2048}};
}

double mr_stft_error(const RTensor& reference, const RTensor& estimate,
                     const std::vector<StftResolution>& resolutions) {
  if (reference.numel() != estimate.numel()) {
    throw std::invalid_argument("mr_stft_error: length mismatch " +
                                std::to_string(reference.numel()) + " vs " +
                                std::to_string(estimate.numel()));
  }
  if (resolutions.empty()) throw std::invalid_argument("mr_stft_error: no resolutions");
  constexpr double kPowerFloor = 1e-7;
  double total = 0.0;
  for (const StftResolution& r : resolutions) {
    const StftConfig cfg(r.n_fft, r.hop, r.win_length);
    const CTensor a = stft(cfg, reference);
    const CTensor b = stft(cfg, estimate);
    double diff2 = 0.0, ref2 = 0.0, log_l1 = 0.0;
    for (std::size_t k = 0; k < a.numel(); ++k) {
      const double ma = std::sqrt(
          std::max(a.real()[k] * a.real()[k] + a.imag()[k] * a.imag()[k], kPowerFloor));
      const double mb = std::sqrt(
          std::max(b.real()[k] * b.real()[k] + b.imag()[k] * b.imag()[k], kPowerFloor));
      diff2 += (mb - ma) * (mb - ma);
      ref2 += ma * ma;
      log_l1 += std::abs(std::log(ma) - std::log(mb));
    }
    total += std::sqrt(diff2) / std::sqrt(ref2) + log_l1 / static_cast<double>(a.numel());
  }
  return total / static_cast<double>(resolutions.size());
}

}  // namespace cvnn
