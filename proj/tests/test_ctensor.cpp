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
#include <numbers>
#include <stdexcept>

#include "cvnn/ctensor.hpp"
#include "oracles.hpp"

namespace cvnn {
namespace {

using cd = std::complex<double>;

TEST(Shape, NumelAndScalar) {
  EXPECT_EQ(Shape{}.numel(), 1u);
  EXPECT_EQ(Shape{}.rank(), 0u);
  EXPECT_EQ((Shape{2, 3, 4}).numel(), 24u);
  EXPECT_EQ((Shape{2, 0}).numel(), 0u);
  EXPECT_EQ((Shape{2, 3}).str(), "[2, 3]");
}

TEST(CTensor, ConstructionChecksPlaneLengths) {
  EXPECT_THROW(CTensor(Shape{2}, {1.0}, {1.0, 2.0}), std::invalid_argument);
  CTensor z(Shape{3});
  EXPECT_EQ(z.numel(), 3u);
  EXPECT_EQ(z.at(2), cd(0.0, 0.0));
}

TEST(Polar, Examples) {
  Polar p = polar_decompose(CTensor::from_values(Shape{3}, {{3, 4}, {-1, 0}, {0, 0}}));
  EXPECT_DOUBLE_EQ(p.magnitude[0], 5.0);
  EXPECT_NEAR(p.phase[0], std::atan2(4.0, 3.0), 1e-15);
  EXPECT_NEAR(p.phase[0], 0.9273, 1e-4);
  EXPECT_DOUBLE_EQ(p.magnitude[1], 1.0);
  EXPECT_DOUBLE_EQ(p.phase[1], std::numbers::pi);  // not -pi
  EXPECT_EQ(p.magnitude[2], 0.0);
  EXPECT_EQ(p.phase[2], 0.0);
}

TEST(Polar, NegativeZeroImaginaryStaysOnPositiveBranch) {
  EXPECT_DOUBLE_EQ(principal_phase(-1.0, -0.0), std::numbers::pi);
  EXPECT_EQ(principal_phase(0.0, -0.0), 0.0);
}

TEST(Polar, ComposeExamples) {
  RTensor r(Shape{3}, {1.0, 2.0, 5.0});
  RTensor t(Shape{3}, {0.0, std::numbers::pi / 2, 0.9273});
  CTensor z = polar_compose(r, t);
  EXPECT_NEAR(std::abs(z.at(0) - cd(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(z.at(1) - cd(0, 2)), 0.0, 1e-15);
  // 0.9273 is a rounded angle, so the round trip is only good to ~1e-4.
  EXPECT_NEAR(z.at(2).real(), 3.0, 2e-4);
  EXPECT_NEAR(z.at(2).imag(), 4.0, 2e-4);
  RTensor exact(Shape{1}, {std::atan2(4.0, 3.0)});
  CTensor w = polar_compose(RTensor(Shape{1}, {5.0}), exact);
  EXPECT_NEAR(std::abs(w.at(0) - cd(3, 4)), 0.0, 1e-9);
}

TEST(Polar, ComposeRejectsNegativeMagnitude) {
  EXPECT_THROW(polar_compose(RTensor(Shape{1}, {-1.0}), RTensor(Shape{1}, {0.0})),
               std::invalid_argument);
  EXPECT_THROW(polar_compose(RTensor(Shape{2}), RTensor(Shape{3})), std::invalid_argument);
}

TEST(Polar, RoundTripRandom) {
  std::mt19937_64 rng(7);
  CTensor z = oracle::random_ctensor(Shape{1000}, rng, 10.0);
  Polar p = polar_decompose(z);
  CTensor back = polar_compose(p.magnitude, p.phase);
  for (std::size_t k = 0; k < z.numel(); ++k) {
    EXPECT_LE(std::abs(back.at(k) - z.at(k)), 1e-12 * std::max(1.0, std::abs(z.at(k))));
    EXPECT_GT(p.phase[k], -std::numbers::pi);
    EXPECT_LE(p.phase[k], std::numbers::pi);
  }
}

TEST(CMul, Examples) {
  CTensor a = CTensor::from_values(Shape{1}, {{1, 2}});
  CTensor b = CTensor::from_values(Shape{1}, {{3, 4}});
  EXPECT_EQ(cmul(a, b).at(0), cd(-5, 10));
  std::mt19937_64 rng(1);
  CTensor z = oracle::random_ctensor(Shape{16}, rng);
  CTensor one = CTensor::scalar({1.0, 0.0});
  EXPECT_EQ(max_abs_diff(cmul(z, one), z), 0.0);
  CTensor m = cmul(z, conj(z));
  for (std::size_t k = 0; k < z.numel(); ++k) {
    EXPECT_NEAR(m.at(k).real(), std::norm(z.at(k)), 1e-15);
    EXPECT_EQ(m.at(k).imag(), 0.0);
  }
}

TEST(CMul, Properties) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    CTensor a = oracle::random_ctensor(Shape{8}, rng, 10.0);
    CTensor b = oracle::random_ctensor(Shape{8}, rng, 10.0);
    CTensor c = oracle::random_ctensor(Shape{8}, rng, 10.0);
    EXPECT_LE(max_abs_diff(cmul(a, b), cmul(b, a)), 1e-12);
    const double scale_abc = 1e3;  // |entries| <= 10, so products reach ~1e3
    EXPECT_LE(max_abs_diff(cmul(cmul(a, b), c), cmul(a, cmul(b, c))), 1e-12 * scale_abc);
    CTensor ab = cmul(a, b);
    for (std::size_t k = 0; k < 8; ++k) {
      EXPECT_NEAR(std::abs(ab.at(k)), std::abs(a.at(k)) * std::abs(b.at(k)), 1e-10);
    }
    EXPECT_EQ(max_abs_diff(conj(conj(a)), a), 0.0);
  }
}

TEST(CMul, Broadcasting) {
  CTensor a = CTensor::from_values(Shape{2, 1}, {{1, 0}, {0, 1}});
  CTensor b = CTensor::from_values(Shape{3}, {{1, 0}, {2, 0}, {0, 1}});
  CTensor c = cmul(a, b);
  ASSERT_EQ(c.shape(), (Shape{2, 3}));
  EXPECT_EQ(c.at(5), cd(-1, 0));
  EXPECT_THROW(cmul(CTensor(Shape{2}), CTensor(Shape{3})), std::invalid_argument);
  EXPECT_EQ(cadd(a, b).at(3), cd(1, 1));
  EXPECT_EQ(csub(a, b).at(0), cd(0, 0));
}

TEST(MatmulOracle, Examples) {
  std::mt19937_64 rng(3);
  CTensor z = oracle::random_ctensor(Shape{3}, rng);
  CTensor eye = CTensor::from_values(Shape{3, 3}, {{1, 0}, {0, 0}, {0, 0}, {0, 0}, {1, 0},
                                                   {0, 0}, {0, 0}, {0, 0}, {1, 0}});
  EXPECT_EQ(max_abs_diff(matmul_oracle(eye, z), z), 0.0);
  CTensor wi = CTensor::from_values(Shape{1, 1}, {{0, 1}});
  EXPECT_EQ(matmul_oracle(wi, CTensor::from_values(Shape{1}, {{1, 0}})).at(0), cd(0, 1));
  EXPECT_THROW(matmul_oracle(eye, CTensor(Shape{2})), std::invalid_argument);
}

TEST(MatmulOracle, MatchesSchoolbook) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    CTensor w = oracle::random_ctensor(Shape{2, 2}, rng);
    CTensor z = oracle::random_ctensor(Shape{2}, rng);
    CTensor ref = oracle::linear(z.reshaped(Shape{1, 2}), w, nullptr).reshaped(Shape{2});
    EXPECT_LE(max_abs_diff(matmul_oracle(w, z), ref), 1e-12);
  }
}

}  // namespace
}  // namespace cvnn
