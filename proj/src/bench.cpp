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

#include "cvnn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <random>
#include <stdexcept>

#include "cvnn/models.hpp"

namespace cvnn {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CTensor random_ctensor(const Shape& shape, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CTensor t(shape);
  for (double& v : t.real()) v = normal(rng);
  for (double& v : t.imag()) v = normal(rng);
  return t;
}

// A network under test: builds the forward graph for a scalar loss.
class Stack {
 public:
  virtual ~Stack() = default;
  virtual Var loss(Tape& t) = 0;
  virtual void set_backend(Backend b) = 0;
};

class GeneratorStack : public Stack {
 public:
  GeneratorStack(const BenchOptions& o, Rng& rng)
      : stem_("stem", ConvGeometry::conv1d(o.gen_channels, o.gen_dim, 7, 1, 3), true, rng),
        input_(random_ctensor(Shape{1, o.gen_channels, o.gen_frames}, rng)) {
    for (std::size_t i = 0; i < o.gen_blocks; ++i) {
      blocks_.emplace_back("block" + std::to_string(i), o.gen_dim, 7, rng, Backend::Block);
    }
  }

  Var loss(Tape& t) override {
    Var h = stem_.forward(t, t.constant(input_));
    for (auto& b : blocks_) h = b.forward(t, h);
    return mean(squared_magnitude(h));
  }

  void set_backend(Backend b) override {
    stem_.set_backend(b);
    for (auto& block : blocks_) block.set_backend(b);
  }

 private:
  ComplexConv1d stem_;
  std::vector<ConvNeXtBlock> blocks_;
  CTensor input_;
};

class DiscriminatorStack : public Stack {
 public:
  DiscriminatorStack(const BenchOptions& o, Rng& rng) {
    // Spectrogram-shaped inputs [1, 1, frames, bins] for three STFT sizes.
    const Shape shapes[] = {Shape{1, 1, 64, 33}, Shape{1, 1, 32, 65}, Shape{1, 1, 16, 129}};
    std::vector<MultiScaleDiscriminator::Scale> scales;
    for (std::size_t s = 0; s < o.disc_scales; ++s) {
      MultiScaleDiscriminator::Scale scale;
      std::size_t in = 1;
      for (std::size_t l = 0; l < o.disc_layers; ++l) {
        ConvGeometry g;
        const bool last = l + 1 == o.disc_layers;
        g.in_channels = in;
        g.out_channels = last ? 1 : o.disc_channels;
        g.kernel_h = 3;
        g.kernel_w = last ? 3 : 9;
        g.pad_h = 1;
        g.pad_w = last ? 1 : 4;
        g.stride_w = (l > 0 && !last) ? 2 : 1;
        scale.convs.push_back(g);
        in = g.out_channels;
      }
      scales.push_back(scale);
      inputs_.push_back(random_ctensor(shapes[s % 3], rng));
    }
    disc_ = std::make_unique<MultiScaleDiscriminator>(scales, 0.1, rng, Backend::Block);
  }

  Var loss(Tape& t) override {
    std::vector<Var> in;
    for (const CTensor& x : inputs_) in.push_back(t.constant(x));
    const std::vector<Var> outs = disc_->forward(t, in);
    Var total = mean(squared_magnitude(outs[0]));
    for (std::size_t i = 1; i < outs.size(); ++i) total = add(total, mean(squared_magnitude(outs[i])));
    return total;
  }

  void set_backend(Backend b) override { disc_->set_backend(b); }

 private:
  std::unique_ptr<MultiScaleDiscriminator> disc_;
  std::vector<CTensor> inputs_;
};

std::unique_ptr<Stack> make_stack(const BenchOptions& o, bool generator) {
  std::seed_seq seq{static_cast<std::uint32_t>(o.seed), static_cast<std::uint32_t>(o.seed >> 32),
                    generator ? 1u : 2u};
  Rng rng(seq);
  if (generator) return std::make_unique<GeneratorStack>(o, rng);
  return std::make_unique<DiscriminatorStack>(o, rng);
}

StackBench measure(const BenchOptions& o, bool generator, bool timed) {
  std::unique_ptr<Stack> stack = make_stack(o, generator);
  StackBench out;
  out.name = generator ? "generator" : "discriminator";
  for (Backend be : kAllBackends) {
    stack->set_backend(be);
    BackendTiming timing;
    timing.backend = be;
    const std::size_t iterations = timed ? o.warmup + o.repeats : 1;
    for (std::size_t it = 0; it < iterations; ++it) {
      Tape t;
      const auto t0 = Clock::now();
      Var loss = stack->loss(t);
      const auto t1 = Clock::now();
      t.backward(loss);
      const auto t2 = Clock::now();
      timing.nodes = t.node_count();
      if (timed && it >= o.warmup) {
        timing.forward_times.push_back(std::chrono::duration<double>(t1 - t0).count());
        timing.backward_times.push_back(std::chrono::duration<double>(t2 - t1).count());
      }
    }
    if (timed) {
      timing.forward_median = median(timing.forward_times);
      timing.backward_median = median(timing.backward_times);
    }
    out.backends.push_back(std::move(timing));
  }
  return out;
}

}  // namespace

void BenchOptions::validate() const {
  if (repeats < 3) throw std::invalid_argument("bench: repeats must be >= 3");
  if (gen_blocks == 0 || gen_channels == 0 || gen_dim == 0 || gen_frames == 0) {
    throw std::invalid_argument("bench: generator stack extents must be positive");
  }
  if (disc_scales == 0 || disc_layers < 2 || disc_channels == 0) {
    throw std::invalid_argument("bench: discriminator needs >= 1 scale and >= 2 layers");
  }
}

const BackendTiming& StackBench::timing(Backend b) const {
  for (const BackendTiming& t : backends) {
    if (t.backend == b) return t;
  }
  throw std::out_of_range("StackBench: backend " + std::string(to_string(b)) + " not measured");
}

double StackBench::node_ratio(Backend numerator, Backend denominator) const {
  return static_cast<double>(timing(numerator).nodes) /
         static_cast<double>(timing(denominator).nodes);
}

BenchReport run_bench(const BenchOptions& options) {
  options.validate();
  BenchReport report;
  report.options = options;
  report.generator = measure(options, true, true);
  report.discriminator = measure(options, false, true);
  return report;
}

StackBench count_nodes(const BenchOptions& options, bool generator) {
  options.validate();
  return measure(options, generator, false);
}

}  // namespace cvnn
