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

// Small networks assembled from the layer primitives: MLPs for the toy GAN,
// a ConvNeXt-style complex generator ending in an iSTFT head, and a
// multi-scale conv2d discriminator used for benchmarking.

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "cvnn/layers.hpp"

namespace cvnn {

// Complex linear layers with split LeakyReLU between them (none after the last).
class ComplexMlp {
 public:
  ComplexMlp(const std::string& name, const std::vector<std::size_t>& widths, double slope,
             Rng& rng, Backend backend);

  Var forward(Tape& tape, Var z);
  std::vector<Parameter*> parameters();
  void set_backend(Backend b);

 private:
  std::vector<ComplexLinear> layers_;
  double slope_;
};

// Real counterpart; activations stay in the real plane.
class RealMlp {
 public:
  RealMlp(const std::string& name, const std::vector<std::size_t>& widths, double slope, Rng& rng);

  Var forward(Tape& tape, Var x);
  std::vector<Parameter*> parameters();

 private:
  std::vector<Linear> layers_;
  double slope_;
};

// x [B, dim, L] -> x + pw2(gelu(pw1(norm(dwconv(x)))))  with the norm and the
// pointwise layers acting on the channel axis.
class ConvNeXtBlock {
 public:
  ConvNeXtBlock(const std::string& name, std::size_t dim, std::size_t kernel, Rng& rng,
                Backend backend);

  Var forward(Tape& tape, Var x);
  std::vector<Parameter*> parameters();
  void set_backend(Backend b);

 private:
  ComplexConv1d dwconv_;
  ComplexLayerNorm norm_;
  ComplexLinear pw1_;
  ComplexLinear pw2_;
};

struct GeneratorShape {
  std::size_t in_channels = 100;  // mel bins
  std::size_t dim = 32;
  std::size_t layers = 2;
  std::size_t bins = 513;
  std::size_t kernel = 7;
  int pq_levels = 0;
  // Pass the head through the complex exponential, so its real part acts as
  // a log-magnitude and its imaginary part as a phase.
  bool exp_output = true;
};

// features [1, in_channels, frames] (real values in the real plane) ->
// complex spectrum [frames, bins].
class ComplexGenerator {
 public:
  ComplexGenerator(const GeneratorShape& shape, Rng& rng, Backend backend);

  Var forward(Tape& tape, Var features);
  std::vector<Parameter*> parameters();
  void set_backend(Backend b);

 private:
  ComplexConv1d stem_;
  PhaseQuantizer pq_;
  std::vector<ConvNeXtBlock> blocks_;
  ComplexLayerNorm norm_;
  ComplexLinear head_;
  bool exp_output_;
};

// Several independent conv2d stacks, one per input scale, with split
// LeakyReLU between layers. Each returns its final feature map.
class MultiScaleDiscriminator {
 public:
  struct Scale {
    std::vector<ConvGeometry> convs;
  };

  MultiScaleDiscriminator(const std::vector<Scale>& scales, double slope, Rng& rng,
                          Backend backend);

  std::vector<Var> forward(Tape& tape, const std::vector<Var>& inputs);
  std::vector<Parameter*> parameters();
  void set_backend(Backend b);
  std::size_t scales() const { return stacks_.size(); }

 private:
  std::vector<std::vector<ComplexConv2d>> stacks_;
  double slope_;
};

std::size_t count_scalars(const std::vector<Parameter*>& params, bool complex_valued);

}  // namespace cvnn
