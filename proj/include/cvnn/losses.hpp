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

// Adversarial and reconstruction losses, plus a kernel-density estimate of
// the Jensen-Shannon divergence between two 1-D sample sets.
//
// Every loss averages over the samples of one score/feature tensor and sums
// over sub-discriminators (outer vector) and layers (inner vector). The
// complex variants apply the real formula to the real and imaginary planes
// independently and take half of the sum.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cvnn/autograd.hpp"
#include "cvnn/ctensor.hpp"

namespace cvnn {

// sum_k mean(max(0, 1 - D_k(y))) + mean(max(0, 1 + D_k(y_hat))).
double hinge_d(const std::vector<RTensor>& real_scores, const std::vector<RTensor>& fake_scores);
double hinge_d_complex(const std::vector<CTensor>& real_scores,
                       const std::vector<CTensor>& fake_scores);
// sum_k mean(max(0, 1 - D_k(y_hat))).
double hinge_g(const std::vector<RTensor>& fake_scores);
double hinge_g_complex(const std::vector<CTensor>& fake_scores);

using FeatureMaps = std::vector<std::vector<RTensor>>;         // [discriminator][layer]
using ComplexFeatureMaps = std::vector<std::vector<CTensor>>;  // [discriminator][layer]

// sum_k sum_l mean|f_real - f_fake|. Throws on mismatched structure or shapes.
double feature_matching(const FeatureMaps& real, const FeatureMaps& fake);
double feature_matching_complex(const ComplexFeatureMaps& real, const ComplexFeatureMaps& fake);

struct LossWeights {
  double mel = 45.0;
  double mpd = 1.0;
  double cmrd = 0.1;
};

struct GeneratorLossTerms {
  double mel_l1 = 0.0;
  double g_mpd = 0.0;
  double fm_mpd = 0.0;
  double g_cmrd = 0.0;
  double fm_cmrd = 0.0;
};

// lambda_mel L_mel + lambda_mpd (L_G + L_FM)_mpd + lambda_cmrd (L_G + L_FM)_cmrd.
// Throws on negative weights or non-finite terms.
double total_generator_loss(const GeneratorLossTerms& terms, const LossWeights& weights = {});

// ---- differentiable forms (one discriminator / one layer each) ---------------

Var hinge_d(Var real_scores, Var fake_scores);
Var hinge_d_complex(Var real_scores, Var fake_scores);
Var hinge_g(Var fake_scores);
Var hinge_g_complex(Var fake_scores);
Var feature_matching(Var real_feats, Var fake_feats);
Var feature_matching_complex(Var real_feats, Var fake_feats);
// mean |a - b| over the real planes.
Var l1_loss(Var a, Var b);
// Mean binary cross-entropy of sigmoid(logits) against a constant label,
// computed stably as softplus(-x) (label 1) or softplus(x) (label 0).
Var bce_with_logits(Var logits, bool label);
double bce_with_logits(std::span<const double> logits, bool label);

// ---- density-based divergence -------------------------------------------------

struct KdeConfig {
  enum class Bandwidth { Scott, Silverman, Fixed };

  Bandwidth rule = Bandwidth::Scott;
  double fixed_bandwidth = 0.0;  // used when rule == Fixed
  std::size_t grid_size = 512;
  // Grid bounds; default [min - 3h, max + 3h] of the pooled samples.
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
};

// Gaussian KDE of each set on a shared grid, each normalised to sum 1,
// JSD = KL(P||M)/2 + KL(Q||M)/2 with M = (P + Q)/2, natural log.
// Throws std::invalid_argument for fewer than 100 samples, a zero-variance set,
// or an invalid config.
double jsd_1d(std::span<const double> a, std::span<const double> b, const KdeConfig& cfg = {});

// Bandwidth chosen by the rule for one sample set.
double kde_bandwidth(std::span<const double> samples, const KdeConfig& cfg);

}  // namespace cvnn
