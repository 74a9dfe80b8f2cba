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

#include "cvnn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cvnn {

namespace {

double mean_hinge(std::span<const double> v, double sign) {
  if (v.empty()) throw std::invalid_argument("hinge loss: empty score tensor");
  double acc = 0.0;
  for (double s : v) acc += std::max(0.0, 1.0 + sign * s);
  return acc / static_cast<double>(v.size());
}

void check_pairing(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(a) + " vs " +
                                std::to_string(b) + " entries");
  }
}

double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
  return acc / static_cast<double>(a.size());
}

}  // namespace

double hinge_d(const std::vector<RTensor>& real_scores, const std::vector<RTensor>& fake_scores) {
  check_pairing(real_scores.size(), fake_scores.size(), "hinge_d: discriminator count");
  double total = 0.0;
  for (std::size_t k = 0; k < real_scores.size(); ++k) {
    total += mean_hinge(real_scores[k].data(), -1.0) + mean_hinge(fake_scores[k].data(), 1.0);
  }
  return total;
}

double hinge_d_complex(const std::vector<CTensor>& real_scores,
                       const std::vector<CTensor>& fake_scores) {
  check_pairing(real_scores.size(), fake_scores.size(), "hinge_d_complex: discriminator count");
  double total = 0.0;
  for (std::size_t k = 0; k < real_scores.size(); ++k) {
    const CTensor& r = real_scores[k];
    const CTensor& f = fake_scores[k];
    total += 0.5 * (mean_hinge(r.real(), -1.0) + mean_hinge(r.imag(), -1.0));
    total += 0.5 * (mean_hinge(f.real(), 1.0) + mean_hinge(f.imag(), 1.0));
  }
  return total;
}

double hinge_g(const std::vector<RTensor>& fake_scores) {
  double total = 0.0;
  for (const RTensor& f : fake_scores) total += mean_hinge(f.data(), -1.0);
  return total;
}

double hinge_g_complex(const std::vector<CTensor>& fake_scores) {
  double total = 0.0;
  for (const CTensor& f : fake_scores) {
    total += 0.5 * (mean_hinge(f.real(), -1.0) + mean_hinge(f.imag(), -1.0));
  }
  return total;
}

double feature_matching(const FeatureMaps& real, const FeatureMaps& fake) {
  check_pairing(real.size(), fake.size(), "feature_matching: discriminator count");
  double total = 0.0;
  for (std::size_t k = 0; k < real.size(); ++k) {
    check_pairing(real[k].size(), fake[k].size(), "feature_matching: layer count");
    for (std::size_t l = 0; l < real[k].size(); ++l) {
      if (!(real[k][l].shape() == fake[k][l].shape())) {
        throw std::invalid_argument("feature_matching: shape mismatch " +
                                    real[k][l].shape().str() + " vs " + fake[k][l].shape().str());
      }
      total += mean_abs_diff(real[k][l].data(), fake[k][l].data());
    }
  }
  return total;
}

double feature_matching_complex(const ComplexFeatureMaps& real, const ComplexFeatureMaps& fake) {
  check_pairing(real.size(), fake.size(), "feature_matching_complex: discriminator count");
  double total = 0.0;
  for (std::size_t k = 0; k < real.size(); ++k) {
    check_pairing(real[k].size(), fake[k].size(), "feature_matching_complex: layer count");
    for (std::size_t l = 0; l < real[k].size(); ++l) {
      const CTensor& r = real[k][l];
      const CTensor& f = fake[k][l];
      if (!(r.shape() == f.shape())) {
        throw std::invalid_argument("feature_matching_complex: shape mismatch " +
                                    r.shape().str() + " vs " + f.shape().str());
      }
      total += 0.5 * (mean_abs_diff(r.real(), f.real()) + mean_abs_diff(r.imag(), f.imag()));
    }
  }
  return total;
}

double total_generator_loss(const GeneratorLossTerms& terms, const LossWeights& weights) {
  if (weights.mel < 0.0 || weights.mpd < 0.0 || weights.cmrd < 0.0) {
    throw std::invalid_argument("total_generator_loss: loss weights must be nonnegative");
  }
  for (double v : {terms.mel_l1, terms.g_mpd, terms.fm_mpd, terms.g_cmrd, terms.fm_cmrd}) {
    if (!std::isfinite(v)) throw std::invalid_argument("total_generator_loss: non-finite term");
  }
  return weights.mel * terms.mel_l1 + weights.mpd * (terms.g_mpd + terms.fm_mpd) +
         weights.cmrd * (terms.g_cmrd + terms.fm_cmrd);
}

// ---- differentiable forms ----------------------------------------------------

namespace {

Var ones_like(Var v) {
  RTensor ones = RTensor::filled(v.shape(), 1.0);
  return v.tape().constant(CTensor::from_real(ones));
}

// mean(max(0, 1 + sign * x)) over the real plane of x.
Var hinge_term(Var x, double sign) { return mean(relu(add(ones_like(x), scale(x, sign)))); }

}  // namespace

Var hinge_d(Var real_scores, Var fake_scores) {
  return add(hinge_term(real_part(real_scores), -1.0), hinge_term(real_part(fake_scores), 1.0));
}

Var hinge_d_complex(Var real_scores, Var fake_scores) {
  Var r = add(hinge_term(real_part(real_scores), -1.0), hinge_term(imag_part(real_scores), -1.0));
  Var f = add(hinge_term(real_part(fake_scores), 1.0), hinge_term(imag_part(fake_scores), 1.0));
  return scale(add(r, f), 0.5);
}

Var hinge_g(Var fake_scores) { return hinge_term(real_part(fake_scores), -1.0); }

Var hinge_g_complex(Var fake_scores) {
  return scale(add(hinge_term(real_part(fake_scores), -1.0),
                   hinge_term(imag_part(fake_scores), -1.0)),
               0.5);
}

Var l1_loss(Var a, Var b) { return mean(magnitude(real_part(sub(a, b)))); }

Var feature_matching(Var real_feats, Var fake_feats) { return l1_loss(real_feats, fake_feats); }

Var feature_matching_complex(Var real_feats, Var fake_feats) {
  Var d = sub(real_feats, fake_feats);
  return scale(add(mean(magnitude(real_part(d))), mean(magnitude(imag_part(d)))), 0.5);
}

Var bce_with_logits(Var logits, bool label) {
  Var x = real_part(logits);
  return mean(softplus(label ? scale(x, -1.0) : x));
}

double bce_with_logits(std::span<const double> logits, bool label) {
  if (logits.empty()) throw std::invalid_argument("bce_with_logits: no logits");
  double acc = 0.0;
  for (double x : logits) {
    const double v = label ? -x : x;
    // softplus(v) = max(v, 0) + log1p(exp(-|v|))
    acc += std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
  }
  return acc / static_cast<double>(logits.size());
}

// ---- KDE Jensen-Shannon ---------------------------------------------------------

namespace {

struct Moments {
  double mean;
  double stddev;
};

Moments moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mu = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return {mu, std::sqrt(ss / (n - 1.0))};
}

double iqr(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
  };
  return quantile(0.75) - quantile(0.25);
}

// Normalised density of `x` on `grid`.
std::vector<double> kde_on_grid(std::span<const double> x, double h,
                                const std::vector<double>& grid) {
  std::vector<double> p(grid.size(), 0.0);
  const double inv_h = 1.0 / h;
  // Kernel mass beyond 8 bandwidths is below 1e-14 of the peak.
  const double cutoff = 8.0 * h;
  const double lo = grid.front();
  const double step = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
  for (double v : x) {
    const auto first = static_cast<std::ptrdiff_t>(std::ceil((v - cutoff - lo) / step));
    const auto last = static_cast<std::ptrdiff_t>(std::floor((v + cutoff - lo) / step));
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    for (std::ptrdiff_t g = std::max<std::ptrdiff_t>(first, 0); g <= std::min(last, n - 1); ++g) {
      const double u = (grid[static_cast<std::size_t>(g)] - v) * inv_h;
      p[static_cast<std::size_t>(g)] += std::exp(-0.5 * u * u);
    }
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0)) throw std::runtime_error("jsd_1d: density vanished on the grid");
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

double kde_bandwidth(std::span<const double> samples, const KdeConfig& cfg) {
  if (cfg.rule == KdeConfig::Bandwidth::Fixed) {
    if (!(cfg.fixed_bandwidth > 0.0)) throw std::invalid_argument("KdeConfig: bandwidth must be > 0");
    return cfg.fixed_bandwidth;
  }
  if (samples.size() < 2) throw std::invalid_argument("kde_bandwidth: need at least 2 samples");
  const Moments m = moments(samples);
  if (!(m.stddev > 0.0)) throw std::invalid_argument("jsd_1d: zero-variance sample set");
  const double n = static_cast<double>(samples.size());
  if (cfg.rule == KdeConfig::Bandwidth::Scott) return m.stddev * std::pow(n, -0.2);
  const double spread = std::min(m.stddev, iqr(samples) / 1.34);
  return 0.9 * (spread > 0.0 ? spread : m.stddev) * std::pow(n, -0.2);
}

double jsd_1d(std::span<const double> a, std::span<const double> b, const KdeConfig& cfg) {
  constexpr std::size_t kMinSamples = 100;
  if (a.size() < kMinSamples || b.size() < kMinSamples) {
    throw std::invalid_argument("jsd_1d: need at least 100 samples per side, got " +
                                std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  if (cfg.grid_size < 64) throw std::invalid_argument("KdeConfig: grid_size must be >= 64");
  for (std::span<const double> s : {a, b}) {
    for (double v : s) {
      if (!std::isfinite(v)) throw std::invalid_argument("jsd_1d: non-finite sample");
    }
  }
  const double ha = kde_bandwidth(a, cfg);
  const double hb = kde_bandwidth(b, cfg);
  const double h = std::max(ha, hb);
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double lo = cfg.grid_lo.value_or(std::min(*amin, *bmin) - 3.0 * h);
  const double hi = cfg.grid_hi.value_or(std::max(*amax, *bmax) + 3.0 * h);
  if (!(hi > lo)) throw std::invalid_argument("KdeConfig: empty grid interval");
  std::vector<double> grid(cfg.grid_size);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  const std::vector<double> p = kde_on_grid(a, ha, grid);
  const std::vector<double> q = kde_on_grid(b, hb, grid);
  double js = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log(q[i] / m);
  }
  return std::clamp(js, 0.0, std::numbers::ln2);
}

}  // namespace cvnn
