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

#include "cvnn/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include "cvnn/layers.hpp"

namespace cvnn {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::pair<Backend, Backend> kPairs[] = {
    {Backend::Naive, Backend::Gauss}, {Backend::Naive, Backend::Block}, {Backend::Gauss, Backend::Block}};

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

CTensor random_ctensor(const Shape& shape, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CTensor t(shape);
  for (double& v : t.real()) v = normal(rng);
  for (double& v : t.imag()) v = normal(rng);
  return t;
}

GradPair random_seed(const Shape& shape, Rng& rng) {
  const CTensor t = random_ctensor(shape, rng);
  GradPair g = GradPair::zeros(shape);
  std::copy(t.real().begin(), t.real().end(), g.g_r.data().begin());
  std::copy(t.imag().begin(), t.imag().end(), g.g_i.data().begin());
  return g;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double max_abs_diff(const GradPair& a, const GradPair& b) {
  return std::max(max_abs_diff(a.g_r.data(), b.g_r.data()),
                  max_abs_diff(a.g_i.data(), b.g_i.data()));
}

// One layer call on fresh leaves (input, weight, optional bias) seeded with a
// fixed upstream gradient.
using Apply = std::function<Var(Var z, Var w, std::optional<Var> b, Backend backend)>;

struct Case {
  CTensor z;
  CTensor w;
  std::optional<CTensor> b;
  GradPair seed;
  Apply apply;
};

struct Outputs {
  CTensor y;
  GradPair gz, gw;
  std::optional<GradPair> gb;
};

Outputs run_case(const Case& c, Backend backend) {
  Tape t;
  Var z = t.input(c.z, true);
  Var w = t.input(c.w, true);
  std::optional<Var> b;
  if (c.b) b = t.input(*c.b, true);
  Var y = c.apply(z, w, b, backend);
  if (!(y.shape() == c.seed.shape())) {
    throw std::logic_error("verify: seed shape " + c.seed.shape().str() + " does not match " +
                           y.shape().str());
  }
  t.backward(y, c.seed);
  Outputs o{y.value(), t.grad(z), t.grad(w), std::nullopt};
  if (b) o.gb = t.grad(*b);
  return o;
}

// <seed, y> as a real number; its gradient is what run_case computes.
double seeded_value(const Case& c, Backend backend) {
  Tape t;
  Var z = t.constant(c.z);
  Var w = t.constant(c.w);
  std::optional<Var> b;
  if (c.b) b = t.constant(*c.b);
  const CTensor y = c.apply(z, w, b, backend).value();
  double s = 0.0;
  for (std::size_t k = 0; k < y.numel(); ++k) {
    s += c.seed.g_r[k] * y.real()[k] + c.seed.g_i[k] * y.imag()[k];
  }
  return s;
}

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

// Central differences of f over every entry of both planes of x.
double probe(CTensor& x, const GradPair& g, const std::function<double()>& f, double h) {
  double worst = 0.0;
  for (int plane = 0; plane < 2; ++plane) {
    std::span<double> values = plane == 0 ? x.real() : x.imag();
    std::span<const double> grads = plane == 0 ? g.g_r.data() : g.g_i.data();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double saved = values[k];
      values[k] = saved + h;
      const double up = f();
      values[k] = saved - h;
      const double down = f();
      values[k] = saved;
      worst = std::max(worst, relative_error(grads[k], (up - down) / (2.0 * h)));
    }
  }
  return worst;
}

double gradcheck_case(Case c, Backend backend, double h) {
  const Outputs o = run_case(c, backend);
  const std::function<double()> f = [&] { return seeded_value(c, backend); };
  double worst = std::max(probe(c.z, o.gz, f, h), probe(c.w, o.gw, f, h));
  if (c.b) worst = std::max(worst, probe(*c.b, *o.gb, f, h));
  return worst;
}

// Running maxima for one layer type, in first-seen order.
class Tally {
 public:
  explicit Tally(std::string layer) : layer_(std::move(layer)) {}

  void note(const std::string& metric, const std::string& pair, double diff, double tolerance) {
    for (VerifyRow& r : rows_) {
      if (r.metric == metric && r.pair == pair) {
        r.max_abs_diff = std::max(r.max_abs_diff, diff);
        return;
      }
    }
    rows_.push_back({layer_, metric, pair, diff, tolerance});
  }
  void note_gradcheck(const std::string& backend, double err, double tolerance) {
    for (GradcheckRow& r : checks_) {
      if (r.backend == backend) {
        r.max_rel_error = std::max(r.max_rel_error, err);
        return;
      }
    }
    checks_.push_back({layer_, backend, err, tolerance});
  }
  void flush(VerifyReport& report) {
    constexpr const char* kOrder[] = {"Forward output", "Input gradient", "Weight gradient",
                                      "Bias gradient"};
    auto rank = [&](const VerifyRow& r) {
      return std::find_if(std::begin(kOrder), std::end(kOrder),
                          [&](const char* m) { return r.metric == m; }) -
             std::begin(kOrder);
    };
    std::stable_sort(rows_.begin(), rows_.end(),
                     [&](const VerifyRow& a, const VerifyRow& b) { return rank(a) < rank(b); });
    report.rows.insert(report.rows.end(), rows_.begin(), rows_.end());
    report.gradchecks.insert(report.gradchecks.end(), checks_.begin(), checks_.end());
  }

 private:
  std::string layer_;
  std::vector<VerifyRow> rows_;
  std::vector<GradcheckRow> checks_;
};

std::string pair_name(Backend a, Backend b) {
  return std::string(to_string(a)) + "/" + std::string(to_string(b));
}

// Compares every backend pair on one case.
void compare_backends(const Case& c, const VerifyOptions& opt, Tally& tally) {
  Outputs out[3];
  for (std::size_t i = 0; i < 3; ++i) out[i] = run_case(c, kAllBackends[i]);
  for (const auto& [a, b] : kPairs) {
    const Outputs& x = out[static_cast<std::size_t>(a)];
    const Outputs& y = out[static_cast<std::size_t>(b)];
    const std::string pair = pair_name(a, b);
    tally.note("Forward output", pair, max_abs_diff(x.y, y.y), opt.forward_tolerance);
    tally.note("Input gradient", pair, max_abs_diff(x.gz, y.gz), opt.gradient_tolerance);
    tally.note("Weight gradient", pair, max_abs_diff(x.gw, y.gw), opt.gradient_tolerance);
    if (c.b) tally.note("Bias gradient", pair, max_abs_diff(*x.gb, *y.gb), opt.gradient_tolerance);
  }
}

// ---- random configurations -------------------------------------------------------

Case linear_case(Rng& rng) {
  const std::size_t in = uniform(rng, 1, 12), out = uniform(rng, 1, 12);
  std::vector<std::size_t> dims(uniform(rng, 1, 3));
  for (std::size_t& d : dims) d = uniform(rng, 1, 4);
  dims.back() = in;
  Case c;
  c.z = random_ctensor(Shape(dims), rng);
  c.w = random_ctensor(Shape{out, in}, rng);
  if (uniform(rng, 0, 3) > 0) c.b = random_ctensor(Shape{out}, rng);
  dims.back() = out;
  c.seed = random_seed(Shape(dims), rng);
  c.apply = [](Var z, Var w, std::optional<Var> b, Backend be) {
    return complex_linear(z, w, b, be);
  };
  return c;
}

// Input length that leaves between 1 and 1 + extra output positions.
std::size_t input_length(std::size_t kernel, std::size_t dilation, std::size_t pad,
                         std::size_t extra, Rng& rng) {
  const std::size_t span = dilation * (kernel - 1) + 1;
  const std::size_t min_len = span > 2 * pad ? span - 2 * pad : 1;
  return min_len + uniform(rng, 0, extra);
}

Case conv_case(Rng& rng, bool one_d) {
  ConvGeometry g;
  g.groups = uniform(rng, 1, one_d ? 3 : 2);
  g.in_channels = g.groups * uniform(rng, 1, one_d ? 3 : 2);
  g.out_channels = g.groups * uniform(rng, 1, 3);
  g.kernel_w = uniform(rng, 1, one_d ? 5 : 3);
  g.stride_w = uniform(rng, 1, one_d ? 3 : 2);
  g.dilation_w = uniform(rng, 1, 2);
  g.pad_w = uniform(rng, 0, one_d ? 2 : 1);
  const std::size_t batch = uniform(rng, 1, 2);
  const std::size_t width = input_length(g.kernel_w, g.dilation_w, g.pad_w, one_d ? 8 : 4, rng);
  Shape in_shape{batch, g.in_channels, width};
  if (!one_d) {
    g.kernel_h = uniform(rng, 1, 3);
    g.stride_h = uniform(rng, 1, 2);
    g.dilation_h = uniform(rng, 1, 2);
    g.pad_h = uniform(rng, 0, 1);
    const std::size_t height = input_length(g.kernel_h, g.dilation_h, g.pad_h, 4, rng);
    in_shape = Shape{batch, g.in_channels, height, width};
  }
  g.validate();
  Case c;
  c.z = random_ctensor(in_shape, rng);
  c.w = random_ctensor(g.weight_shape(one_d), rng);
  if (uniform(rng, 0, 3) > 0) c.b = random_ctensor(Shape{g.out_channels}, rng);
  c.seed = random_seed(conv_output_shape(g, conv_extent(g, in_shape, one_d), one_d), rng);
  c.apply = [g, one_d](Var z, Var w, std::optional<Var> b, Backend be) {
    return complex_conv(z, w, b, g, one_d, be);
  };
  return c;
}

Case layernorm_case(Rng& rng) {
  const std::size_t rows = uniform(rng, 1, 4), n = uniform(rng, 4, 16);
  Case c;
  c.z = random_ctensor(Shape{rows, n}, rng);
  c.w = random_ctensor(Shape{n}, rng);  // gamma
  c.b = random_ctensor(Shape{n}, rng);  // beta
  c.seed = random_seed(Shape{rows, n}, rng);
  c.apply = [](Var z, Var gamma, std::optional<Var> beta, Backend) {
    return complex_layernorm(z, gamma, *beta, ComplexLayerNorm::kDefaultEps);
  };
  return c;
}

// Whitening through a numerical eigendecomposition of the covariance rather
// than the closed form used by the layer.
CTensor layernorm_reference(const CTensor& z, const CTensor& gamma, const CTensor& beta,
                            double eps) {
  const std::size_t n = gamma.numel(), rows = z.numel() / n;
  CTensor out(z.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    std::complex<double> mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += z.at(r * n + j);
    mu /= static_cast<double>(n);
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (std::size_t j = 0; j < n; ++j) {
      const std::complex<double> c = z.at(r * n + j) - mu;
      const Eigen::Vector2d v(c.real(), c.imag());
      cov += v * v.transpose();
    }
    cov = cov / static_cast<double>(n) + eps * Eigen::Matrix2d::Identity();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const Eigen::Matrix2d inv_sqrt = es.operatorInverseSqrt();
    for (std::size_t j = 0; j < n; ++j) {
      const std::complex<double> c = z.at(r * n + j) - mu;
      const Eigen::Vector2d w = inv_sqrt * Eigen::Vector2d(c.real(), c.imag());
      out.set(r * n + j, gamma.at(j) * std::complex<double>(w(0), w(1)) + beta.at(j));
    }
  }
  return out;
}

std::complex<double> pq_reference(std::complex<double> z, int levels) {
  if (levels == 0) return z;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double q = kTwoPi / levels * std::round(levels * std::arg(z) / kTwoPi);
  if (q <= -std::numbers::pi) q += kTwoPi;
  if (q > std::numbers::pi) q -= kTwoPi;
  return std::polar(std::abs(z), q);
}

int pq_levels(Rng& rng) {
  constexpr int kFixed[] = {0, 4, 128, 512};
  const std::size_t pick = uniform(rng, 0, 4);
  return pick < 4 ? kFixed[pick] : static_cast<int>(uniform(rng, 1, 1024));
}

// The straight-through estimator differentiates PQ(z) as z + c with the shift
// c = PQ(z0) - z0 held fixed; check the tape against central differences of
// sum |u + c - t|^2 at u = z0.
double pq_gradcheck(const CTensor& z0, const CTensor& target, int levels, double h) {
  Tape t;
  Var z = t.input(z0, true);
  t.backward(sum(squared_magnitude(sub(phase_quantize(z, levels), t.constant(target)))));
  const GradPair g = t.grad(z);
  const CTensor q0 = phase_quantize(z0, levels);
  CTensor u = z0;
  const std::function<double()> f = [&] {
    double s = 0.0;
    for (std::size_t k = 0; k < u.numel(); ++k) {
      s += std::norm(u.at(k) + (q0.at(k) - z0.at(k)) - target.at(k));
    }
    return s;
  };
  return probe(u, g, f, h);
}

}  // namespace

bool VerifyReport::passed() const { return !first_failure().has_value(); }

std::optional<std::string> VerifyReport::first_failure() const {
  std::ostringstream msg;
  msg.precision(3);
  for (const VerifyRow& r : rows) {
    if (r.passed()) continue;
    const std::size_t slash = r.pair.find('/');
    msg << r.layer << ": " << r.metric << " differs between " << r.pair.substr(0, slash)
        << " and " << r.pair.substr(slash + 1) << " (max abs diff " << r.max_abs_diff << " > "
        << r.tolerance << ")";
    return msg.str();
  }
  for (const GradcheckRow& r : gradchecks) {
    if (r.passed()) continue;
    msg << r.layer << ": gradient check on backend " << r.backend << " failed (relative error "
        << r.max_rel_error << " > " << r.tolerance << ")";
    return msg.str();
  }
  return std::nullopt;
}

VerifyReport run_verify(const VerifyOptions& opt) {
  const auto start = Clock::now();
  VerifyReport report;
  report.options = opt;
  if (opt.trials == 0) return report;
  const std::size_t fd_trials = std::min(opt.gradcheck_trials, opt.trials);

  // Each layer type draws from its own stream so adding trials to one does
  // not reshuffle the others.
  std::uint64_t salt = 0;
  auto stream = [&] {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(++salt)};
    return Rng(seq);
  };

  struct Family {
    const char* name;
    std::function<Case(Rng&)> draw;
  };
  const Family families[] = {
      {"linear", linear_case},
      {"conv1d", [](Rng& r) { return conv_case(r, true); }},
      {"conv2d", [](Rng& r) { return conv_case(r, false); }},
  };
  for (const Family& fam : families) {
    Rng rng = stream();
    Tally tally(fam.name);
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
      const Case c = fam.draw(rng);
      compare_backends(c, opt, tally);
      if (trial < fd_trials) {
        for (Backend be : kAllBackends) {
          tally.note_gradcheck(std::string(to_string(be)), gradcheck_case(c, be, opt.fd_step),
                               opt.gradcheck_tolerance);
        }
      }
    }
    tally.flush(report);
  }

  {
    Rng rng = stream();
    Tally tally("layernorm");
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
      const Case c = layernorm_case(rng);
      const Outputs o = run_case(c, Backend::Block);
      const CTensor ref = layernorm_reference(c.z, c.w, *c.b, ComplexLayerNorm::kDefaultEps);
      tally.note("Forward output", "tape/reference", max_abs_diff(o.y, ref), opt.forward_tolerance);
      if (trial < fd_trials) {
        tally.note_gradcheck("-", gradcheck_case(c, Backend::Block, opt.fd_step),
                             opt.gradcheck_tolerance);
      }
    }
    tally.flush(report);
  }

  {
    Rng rng = stream();
    Tally tally("pq");
    for (std::size_t trial = 0; trial < opt.trials; ++trial) {
      const int levels = pq_levels(rng);
      const CTensor z0 = random_ctensor(Shape{uniform(rng, 1, 64)}, rng);
      const GradPair seed = random_seed(z0.shape(), rng);
      Tape t;
      Var z = t.input(z0, true);
      Var y = phase_quantize(z, levels);
      t.backward(y, seed);
      CTensor ref(z0.shape());
      for (std::size_t k = 0; k < z0.numel(); ++k) ref.set(k, pq_reference(z0.at(k), levels));
      tally.note("Forward output", "tape/reference", max_abs_diff(y.value(), ref),
                 opt.forward_tolerance);
      tally.note("Input gradient", "tape/identity", max_abs_diff(t.grad(z), seed),
                 opt.gradient_tolerance);
      if (trial < fd_trials) {
        const CTensor target = random_ctensor(z0.shape(), rng);
        tally.note_gradcheck("-", pq_gradcheck(z0, target, levels, opt.fd_step),
                             opt.gradcheck_tolerance);
      }
    }
    tally.flush(report);
  }

  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace cvnn
