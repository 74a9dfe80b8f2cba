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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cvnn/losses.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

namespace cvnn {
namespace {

RTensor r(std::initializer_list<double> v) { return RTensor(Shape{v.size()}, std::vector<double>(v)); }

TEST(Hinge, HandExamples) {
  EXPECT_DOUBLE_EQ(hinge_d({r({0.5, 2.0})}, {r({-2.0, 0.0})}), 0.75);
  EXPECT_DOUBLE_EQ(hinge_g({r({-2.0, 0.0})}), 2.0);
  // Two sub-discriminators sum.
  EXPECT_DOUBLE_EQ(hinge_g({r({-2.0, 0.0}), r({1.0})}), 2.0);
  EXPECT_DOUBLE_EQ(hinge_d({r({1.0})}, {r({-1.0})}), 0.0);
  EXPECT_THROW(hinge_d({r({1.0})}, {}), std::invalid_argument);
}

TEST(Hinge, ComplexWithZeroImaginaryParts) {
  std::mt19937_64 rng(1);
  const RTensor a = oracle::random_rtensor(Shape{16}, rng, 3.0);
  const RTensor b = oracle::random_rtensor(Shape{16}, rng, 3.0);
  const double real = hinge_d({a}, {b});
  // The zero imaginary plane contributes max(0, 1 - 0) + max(0, 1 + 0) = 2, halved.
  EXPECT_NEAR(hinge_d_complex({CTensor::from_real(a)}, {CTensor::from_real(b)}), 0.5 * real + 1.0,
              1e-15);
  EXPECT_NEAR(hinge_g_complex({CTensor::from_real(b)}), 0.5 * hinge_g({b}) + 0.5, 1e-15);
}

TEST(Hinge, ComplexSplitsPlanes) {
  const CTensor s = CTensor::from_values(Shape{2}, {{2.0, -3.0}, {0.5, 0.0}});
  // Real plane: mean(max(0, 1 - [2, 0.5])) = 0.25; imaginary: mean([4, 1]) = 2.5.
  EXPECT_DOUBLE_EQ(hinge_g_complex({s}), 0.5 * (0.25 + 2.5));
}

TEST(FeatureMatching, HandExamplesAndErrors) {
  EXPECT_DOUBLE_EQ(feature_matching({{r({1.0, 2.0})}}, {{r({0.0, 4.0})}}), 1.5);
  EXPECT_DOUBLE_EQ(feature_matching({{r({1.0}), r({2.0, 2.0})}}, {{r({1.0}), r({0.0, 0.0})}}), 2.0);
  const CTensor a = CTensor::from_values(Shape{1}, {{1.0, 1.0}});
  const CTensor b = CTensor::from_values(Shape{1}, {{0.0, -2.0}});
  EXPECT_DOUBLE_EQ(feature_matching_complex({{a}}, {{b}}), 0.5 * (1.0 + 3.0));
  EXPECT_THROW(feature_matching({{r({1.0})}}, {{r({1.0, 2.0})}}), std::invalid_argument);
  EXPECT_THROW(feature_matching({{r({1.0})}}, {{r({1.0})}, {r({1.0})}}), std::invalid_argument);
  EXPECT_THROW(feature_matching({{r({1.0}), r({1.0})}}, {{r({1.0})}}), std::invalid_argument);
}

TEST(TotalLoss, WeightsAndValidation) {
  GeneratorLossTerms terms{1.0, 1.0, 1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(total_generator_loss(terms), 45.0 + 2.0 + 0.2);
  terms = {0.5, 2.0, 3.0, 10.0, 20.0};
  EXPECT_DOUBLE_EQ(total_generator_loss(terms, {1.0, 0.0, 1.0}), 0.5 + 30.0);
  EXPECT_THROW(total_generator_loss(terms, {-1.0, 1.0, 1.0}), std::invalid_argument);
  terms.g_mpd = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(total_generator_loss(terms), std::invalid_argument);
}

TEST(Bce, StableValues) {
  const std::vector<double> zero{0.0};
  EXPECT_NEAR(bce_with_logits(zero, true), std::log(2.0), 1e-15);
  const std::vector<double> big{800.0, -800.0};
  EXPECT_NEAR(bce_with_logits(big, true), 400.0, 1e-9);
  EXPECT_NEAR(bce_with_logits(big, false), 400.0, 1e-9);
  Tape t;
  Var v = bce_with_logits(t.constant(CTensor::from_real(RTensor(Shape{2}, big))), true);
  EXPECT_NEAR(v.value().real()[0], 400.0, 1e-9);
}

TEST(TapeLosses, AgreeWithPlainForms) {
  std::mt19937_64 rng(2);
  const RTensor a = oracle::random_rtensor(Shape{12}, rng, 2.0);
  const RTensor b = oracle::random_rtensor(Shape{12}, rng, 2.0);
  const CTensor ca = oracle::random_ctensor(Shape{12}, rng, 2.0);
  const CTensor cb = oracle::random_ctensor(Shape{12}, rng, 2.0);
  Tape t;
  Var va = t.constant(CTensor::from_real(a)), vb = t.constant(CTensor::from_real(b));
  Var wa = t.constant(ca), wb = t.constant(cb);
  auto val = [](Var v) { return v.value().real()[0]; };
  EXPECT_NEAR(val(hinge_d(va, vb)), hinge_d({a}, {b}), 1e-14);
  EXPECT_NEAR(val(hinge_g(vb)), hinge_g({b}), 1e-14);
  EXPECT_NEAR(val(hinge_d_complex(wa, wb)), hinge_d_complex({ca}, {cb}), 1e-14);
  EXPECT_NEAR(val(hinge_g_complex(wb)), hinge_g_complex({cb}), 1e-14);
  EXPECT_NEAR(val(feature_matching(va, vb)), feature_matching({{a}}, {{b}}), 1e-14);
  EXPECT_NEAR(val(feature_matching_complex(wa, wb)), feature_matching_complex({{ca}}, {{cb}}),
              1e-14);
  EXPECT_NEAR(val(bce_with_logits(va, false)), bce_with_logits(a.data(), false), 1e-14);
}

TEST(TapeLosses, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  const std::vector<std::pair<const char*, oracle::LossBuilder>> cases = {
      {"hinge_d", [](Tape&, const std::vector<Var>& v) { return hinge_d(v[0], v[1]); }},
      {"hinge_d_complex",
       [](Tape&, const std::vector<Var>& v) { return hinge_d_complex(v[0], v[1]); }},
      {"hinge_g", [](Tape&, const std::vector<Var>& v) { return hinge_g(v[0]); }},
      {"hinge_g_complex", [](Tape&, const std::vector<Var>& v) { return hinge_g_complex(v[0]); }},
      {"fm", [](Tape&, const std::vector<Var>& v) { return feature_matching(v[0], v[1]); }},
      {"fm_complex",
       [](Tape&, const std::vector<Var>& v) { return feature_matching_complex(v[0], v[1]); }},
      {"l1", [](Tape&, const std::vector<Var>& v) { return l1_loss(v[0], v[1]); }},
      {"bce1", [](Tape&, const std::vector<Var>& v) { return bce_with_logits(v[0], true); }},
      {"bce0", [](Tape&, const std::vector<Var>& v) { return bce_with_logits(v[1], false); }},
  };
  for (const auto& [name, build] : cases) {
    EXPECT_LE(oracle::gradcheck(build, {oracle::random_ctensor(Shape{3, 5}, rng, 2.0),
                                        oracle::random_ctensor(Shape{3, 5}, rng, 2.0)}),
              1e-6)
        << name;
  }
}

// ---- KDE JSD --------------------------------------------------------------------------

std::vector<double> gaussian(std::size_t n, double mean, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

TEST(Jsd, IdenticalSetsScoreZero) {
  const auto a = gaussian(2000, 0.0, 1.0, 1);
  EXPECT_NEAR(jsd_1d(a, a), 0.0, 1e-12);
}

TEST(Jsd, DisjointSetsApproachLogTwo) {
  const double v = jsd_1d(gaussian(5000, 0.0, 1.0, 2), gaussian(5000, 10.0, 1.0, 3));
  EXPECT_NEAR(v, std::log(2.0), 0.01);
  EXPECT_LE(v, std::log(2.0));
}

TEST(Jsd, IndependentDrawsAreClose) {
  EXPECT_LE(jsd_1d(gaussian(10000, 0.0, 1.0, 4), gaussian(10000, 0.0, 1.0, 5)), 0.005);
}

TEST(Jsd, SymmetricAndOrdered) {
  const auto a = gaussian(3000, 0.0, 1.0, 6), b = gaussian(3000, 1.0, 1.5, 7);
  EXPECT_NEAR(jsd_1d(a, b), jsd_1d(b, a), 1e-12);
  const auto c = gaussian(3000, 3.0, 1.5, 8);
  EXPECT_LT(jsd_1d(a, b), jsd_1d(a, c));
}

TEST(Jsd, BandwidthRules) {
  const auto a = gaussian(1000, 0.0, 2.0, 9);
  KdeConfig cfg;
  const double scott = kde_bandwidth(a, cfg);
  EXPECT_NEAR(scott, 2.0 * std::pow(1000.0, -0.2), 0.1 * scott);
  cfg.rule = KdeConfig::Bandwidth::Silverman;
  EXPECT_LT(kde_bandwidth(a, cfg), scott);
  cfg.rule = KdeConfig::Bandwidth::Fixed;
  cfg.fixed_bandwidth = 0.25;
  EXPECT_EQ(kde_bandwidth(a, cfg), 0.25);
  EXPECT_GE(jsd_1d(a, gaussian(1000, 0.5, 2.0, 10), cfg), 0.0);
}

TEST(Jsd, Errors) {
  const auto a = gaussian(500, 0.0, 1.0, 11);
  EXPECT_THROW(jsd_1d(a, gaussian(99, 0.0, 1.0, 12)), std::invalid_argument);
  const std::vector<double> flat(500, 1.0);
  EXPECT_THROW(jsd_1d(a, flat), std::invalid_argument);
  KdeConfig cfg;
  cfg.rule = KdeConfig::Bandwidth::Fixed;
  EXPECT_THROW(jsd_1d(a, a, cfg), std::invalid_argument);
  cfg = {};
  cfg.grid_size = 8;
  EXPECT_THROW(jsd_1d(a, a, cfg), std::invalid_argument);
  std::vector<double> bad = a;
  bad[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(jsd_1d(a, bad), std::invalid_argument);
}

}  // namespace
}  // namespace cvnn
