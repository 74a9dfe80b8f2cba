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

#include "cvnn/autograd.hpp"
#include "cvnn/layers.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

namespace cvnn {
namespace {

using cd = std::complex<double>;

CTensor scalar_tensor(cd v) { return CTensor::from_values(Shape{1}, {v}); }

TEST(Backward, SquaredMagnitude) {
  Tape t;
  Var z = t.input(scalar_tensor({3, 4}), true);
  t.backward(sum(squared_magnitude(z)));
  const GradPair g = t.grad(z);
  EXPECT_DOUBLE_EQ(g.g_r[0], 6.0);
  EXPECT_DOUBLE_EQ(g.g_i[0], 8.0);
}

TEST(Backward, RealPartOfProduct) {
  const double a = 1.5, b = -0.75;
  Tape t;
  Var w = t.constant(scalar_tensor({a, b}));
  Var z = t.input(scalar_tensor({0.3, -2.0}), true);
  t.backward(sum(real_part(mul(w, z))));
  const GradPair g = t.grad(z);
  EXPECT_DOUBLE_EQ(g.g_r[0], a);
  EXPECT_DOUBLE_EQ(g.g_i[0], -b);
}

TEST(Backward, QuadraticMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    CTensor w = oracle::random_ctensor(Shape{2, 2}, rng);
    CTensor target = oracle::random_ctensor(Shape{1, 2}, rng);
    auto build = [&](Tape&, const std::vector<Var>& in) {
      // W z with the weight as a leaf too, via the naive backend.
      Var y = complex_linear(in[0], in[1], std::nullopt, Backend::Naive);
      return oracle::squared_error(y, target);
    };
    EXPECT_LE(oracle::gradcheck(build, {oracle::random_ctensor(Shape{1, 2}, rng), w}), 1e-6);
  }
}

TEST(Backward, RejectsBadLoss) {
  Tape t;
  Var z = t.input(CTensor(Shape{2}), true);
  EXPECT_THROW(t.backward(z), std::invalid_argument);
  Var c = t.input(scalar_tensor({1.0, 0.5}), true);
  EXPECT_THROW(t.backward(sum(c)), std::invalid_argument);
}

TEST(Backward, UnusedParametersReceiveZeroGradient) {
  Parameter used("used", scalar_tensor({1, 1}));
  Parameter unused("unused", CTensor(Shape{3}));
  Tape t;
  Var u = t.param(used);
  t.param(unused);
  t.backward(sum(squared_magnitude(u)));
  ASSERT_TRUE(unused.grad.has_value());
  EXPECT_EQ(unused.grad->g_r.data().size(), 3u);
  for (double v : unused.grad->g_r.data()) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(used.grad->g_r[0], 2.0);
}

TEST(Backward, ParamLeafIsSharedAcrossUses) {
  Parameter p("p", scalar_tensor({2, 0}));
  Tape t;
  Var a = t.param(p);
  Var b = t.param(p);
  EXPECT_EQ(a.id(), b.id());
  t.backward(sum(real_part(mul(a, b))));  // p^2
  EXPECT_DOUBLE_EQ(p.grad->g_r[0], 4.0);
}

TEST(Primitives, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  const Shape s{3, 4};
  struct Case {
    const char* name;
    oracle::LossBuilder build;
    int inputs;
  };
  const CTensor target = oracle::random_ctensor(s, rng);
  std::vector<Case> cases = {
      {"add", [&](Tape&, auto& in) { return oracle::squared_error(add(in[0], in[1]), target); }, 2},
      {"sub", [&](Tape&, auto& in) { return oracle::squared_error(sub(in[0], in[1]), target); }, 2},
      {"mul", [&](Tape&, auto& in) { return oracle::squared_error(mul(in[0], in[1]), target); }, 2},
      {"scale", [&](Tape&, auto& in) { return oracle::squared_error(scale(in[0], -1.7), target); }, 1},
      {"conj", [&](Tape&, auto& in) { return oracle::squared_error(conj(in[0]), target); }, 1},
      {"real", [&](Tape&, auto& in) { return oracle::squared_error(real_part(in[0]), target); }, 1},
      {"imag", [&](Tape&, auto& in) { return oracle::squared_error(imag_part(in[0]), target); }, 1},
      {"complex",
       [&](Tape&, auto& in) { return oracle::squared_error(make_complex(in[0], in[1]), target); }, 2},
      {"magnitude",
       [&](Tape&, auto& in) { return oracle::squared_error(magnitude(in[0]), target); }, 1},
      {"softplus",
       [&](Tape&, auto& in) { return oracle::squared_error(softplus(in[0]), target); }, 1},
      {"exp", [&](Tape&, auto& in) { return oracle::squared_error(exp(in[0]), target); }, 1},
      {"log_clamp",
       [&](Tape&, auto& in) {
         return oracle::squared_error(log_clamp(add(squared_magnitude(in[0]),
                                                    in[0].tape().constant(CTensor::from_real(
                                                        RTensor::filled(s, 0.5)))),
                                                1e-7),
                                      target);
       },
       1},
      {"mean", [&](Tape&, auto& in) { return sum(squared_magnitude(scale(mean(in[0]), 3.0))); }, 1},
      {"transpose",
       [&](Tape&, auto& in) {
         return oracle::squared_error(transpose_last2(in[0]), target.reshaped(Shape{4, 3}));
       },
       1},
      {"reshape",
       [&](Tape&, auto& in) {
         return oracle::squared_error(reshape(in[0], Shape{2, 6}), target.reshaped(Shape{2, 6}));
       },
       1},
  };
  for (const Case& c : cases) {
    std::vector<CTensor> inputs;
    for (int i = 0; i < c.inputs; ++i) inputs.push_back(oracle::random_ctensor(s, rng));
    EXPECT_LE(oracle::gradcheck(c.build, inputs), 1e-6) << c.name;
  }
}

TEST(Primitives, ComplexExponentialValues) {
  Tape tape;
  CTensor z(Shape{3});
  z.imag()[0] = std::numbers::pi;
  z.real()[1] = std::log(2.0);
  z.real()[2] = 1.0;
  z.imag()[2] = std::numbers::pi / 2;
  const CTensor w = exp(tape.input(z)).value();
  EXPECT_NEAR(w.real()[0], -1.0, 1e-15);
  EXPECT_NEAR(w.imag()[0], 0.0, 1e-15);
  EXPECT_NEAR(w.real()[1], 2.0, 1e-15);
  EXPECT_NEAR(w.real()[2], 0.0, 1e-15);
  EXPECT_NEAR(w.imag()[2], std::numbers::e, 1e-15);
}

TEST(Primitives, MatmulAndBiasGradients) {
  std::mt19937_64 rng(13);
  const CTensor target = CTensor::from_real(oracle::random_rtensor(Shape{3, 5}, rng));
  auto mm = [&](Tape&, const std::vector<Var>& in) {
    return oracle::squared_error(matmul_nt(in[0], in[1]), target);
  };
  EXPECT_LE(oracle::gradcheck(mm, {CTensor::from_real(oracle::random_rtensor(Shape{3, 4}, rng)),
                                   CTensor::from_real(oracle::random_rtensor(Shape{5, 4}, rng))}),
            1e-6);
  const CTensor t2 = oracle::random_ctensor(Shape{2, 3, 4}, rng);
  auto bias = [&](Tape&, const std::vector<Var>& in) {
    return oracle::squared_error(add_bias(in[0], in[1], 1), t2);
  };
  EXPECT_LE(oracle::gradcheck(bias, {oracle::random_ctensor(Shape{2, 3, 4}, rng),
                                     oracle::random_ctensor(Shape{3}, rng)}),
            1e-6);
}

TEST(SteIdentity, ForwardAndBackward) {
  Tape t;
  Var z = t.input(scalar_tensor({0.3, 0.4}), true);
  const CTensor q = scalar_tensor({0.5, 0.0});
  Var y = ste_identity(z, q);
  EXPECT_EQ(y.value().at(0), cd(0.5, 0.0));
  GradPair seed = GradPair::zeros(Shape{1});
  seed.g_r[0] = 0.123;
  seed.g_i[0] = -4.5;
  t.backward(y, seed);
  EXPECT_EQ(t.grad(z).g_r[0], 0.123);
  EXPECT_EQ(t.grad(z).g_i[0], -4.5);
  EXPECT_THROW(ste_identity(z, CTensor(Shape{2})), std::invalid_argument);
}

TEST(SteIdentity, QuantizedSquaredMagnitudeGradient) {
  // dL/dq = 2 PQ(z) reaches z unchanged. It has the magnitude of the direct
  // gradient 2 z but the quantized phase, so the two are not equal vectors.
  std::mt19937_64 rng(14);
  const CTensor v = oracle::random_ctensor(Shape{32}, rng);
  const CTensor q = phase_quantize(v, 4);
  Tape a;
  Var za = a.input(v, true);
  a.backward(sum(squared_magnitude(phase_quantize(za, 4))));
  Tape b;
  Var zb = b.input(v, true);
  b.backward(sum(squared_magnitude(zb)));
  const GradPair ga = a.grad(za), gb = b.grad(zb);
  for (std::size_t k = 0; k < v.numel(); ++k) {
    EXPECT_NEAR(ga.g_r[k], 2.0 * q.real()[k], 1e-12);
    EXPECT_NEAR(ga.g_i[k], 2.0 * q.imag()[k], 1e-12);
    EXPECT_NEAR(std::hypot(ga.g_r[k], ga.g_i[k]), std::hypot(gb.g_r[k], gb.g_i[k]), 1e-12);
  }
}

TEST(NodeCount, EmptyTapeAndGoldenLinearCounts) {
  Tape empty;
  EXPECT_EQ(empty.node_count(), 0u);

  Rng rng(5);
  std::map<Backend, std::size_t> counts;
  for (Backend b : kAllBackends) {
    ComplexLinear layer("fc", 6, 4, true, rng, b);
    Tape t;
    layer.forward(t, t.input(CTensor(Shape{2, 6})));
    counts[b] = t.node_count();
  }
  // Leaves: input, weight, bias.
  EXPECT_EQ(counts[Backend::Naive], 15u);
  EXPECT_EQ(counts[Backend::Gauss], 17u);
  EXPECT_EQ(counts[Backend::Block], 4u);
  EXPECT_LT(counts[Backend::Block], counts[Backend::Naive]);
}

TEST(NodeCount, DeterministicAcrossRuns) {
  auto run = [] {
    Rng rng(9);
    ComplexLinear a("a", 5, 7, true, rng, Backend::Naive);
    ComplexLinear b("b", 7, 3, false, rng, Backend::Naive);
    Tape t;
    Var y = b.forward(t, split_gelu(a.forward(t, t.input(CTensor(Shape{4, 5})))));
    (void)y;
    return std::make_pair(t.node_count(), t.histogram());
  };
  EXPECT_EQ(run(), run());
}

TEST(Optimizer, SgdStepExample) {
  Parameter p("z", scalar_tensor({1, 1}));
  p.grad = GradPair::zeros(Shape{1});
  p.grad->g_r[0] = 2.0;
  p.grad->g_i[0] = 2.0;
  std::vector<Parameter*> ps{&p};
  sgd_step(ps, 0.5);
  EXPECT_EQ(p.value.at(0), cd(0, 0));
}

TEST(Optimizer, MissingGradientThrows) {
  Parameter p("z", scalar_tensor({1, 1}));
  std::vector<Parameter*> ps{&p};
  EXPECT_THROW(sgd_step(ps, 0.1), std::logic_error);
  Adam adam(ps, {});
  EXPECT_THROW(adam.step(), std::logic_error);
}

TEST(Optimizer, DescentOnConvexQuadratic) {
  Parameter p("z", scalar_tensor({0, 0}));
  std::vector<Parameter*> ps{&p};
  auto loss = [&] {
    Tape t;
    Var l = sum(squared_magnitude(sub(t.param(p), t.constant(scalar_tensor({1, 2})))));
    const double v = l.value().real()[0];
    zero_grad(ps);
    t.backward(l);
    return v;
  };
  const double before = loss();
  sgd_step(ps, 0.25);
  EXPECT_LT(loss(), before);
}

TEST(Optimizer, GradientDescentSolvesLinearSystem) {
  std::mt19937_64 rng(15);
  // Well conditioned: identity plus a small perturbation.
  CTensor w = oracle::random_ctensor(Shape{3, 3}, rng, 0.1);
  for (std::size_t i = 0; i < 3; ++i) w.real()[i * 3 + i] += 1.0;
  const CTensor target = oracle::random_ctensor(Shape{1, 3}, rng);
  Parameter z("z", CTensor(Shape{1, 3}));
  std::vector<Parameter*> ps{&z};
  double previous = 1e300;
  double last = 0.0;
  for (int step = 0; step < 100; ++step) {
    Tape t;
    Var weight = t.constant(w);
    Var l = oracle::squared_error(complex_linear(t.param(z), weight, std::nullopt, Backend::Block),
                                  target);
    last = l.value().real()[0];
    EXPECT_LE(last, previous);
    previous = last;
    zero_grad(ps);
    t.backward(l);
    sgd_step(ps, 0.2);
  }
  EXPECT_LT(last, 1e-12);  // squared residual, i.e. residual < 1e-6
}

TEST(Optimizer, AdamDefaultsAndDecrease) {
  Parameter p("z", scalar_tensor({3, -2}));
  std::vector<Parameter*> ps{&p};
  Adam adam(ps, {});
  EXPECT_EQ(adam.options().beta1, 0.8);
  EXPECT_EQ(adam.options().beta2, 0.9);
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 200; ++i) {
    Tape t;
    Var l = sum(squared_magnitude(t.param(p)));
    last = l.value().real()[0];
    if (i == 0) first = last;
    adam.zero_grad();
    t.backward(l);
    adam.step();
  }
  EXPECT_EQ(adam.step_count(), 200u);
  EXPECT_LT(last, first);
}

}  // namespace
}  // namespace cvnn
