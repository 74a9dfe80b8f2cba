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

// Forward/backward timing and backward-graph size of a generator-like and a
// discriminator-like stack under each backend.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cvnn/layers.hpp"

namespace cvnn {

struct BenchOptions {
  std::uint64_t seed = 0;
  std::size_t repeats = 10;  // timed iterations per backend, at least 3
  std::size_t warmup = 2;    // discarded iterations per backend

  // Generator-like stack: a conv1d stem followed by ConvNeXt-style blocks
  // (depthwise conv1d, layer norm, two pointwise linear layers).
  std::size_t gen_blocks = 8;
  std::size_t gen_channels = 32;
  std::size_t gen_dim = 64;
  std::size_t gen_frames = 128;

  // Discriminator-like stack: independent conv2d stacks over spectrogram
  // inputs at several resolutions.
  std::size_t disc_scales = 3;
  std::size_t disc_layers = 5;
  std::size_t disc_channels = 16;

  void validate() const;
};

struct BackendTiming {
  Backend backend = Backend::Block;
  std::size_t nodes = 0;            // tape nodes including leaves
  double forward_median = 0.0;      // seconds
  double backward_median = 0.0;     // seconds
  std::vector<double> forward_times;
  std::vector<double> backward_times;
};

struct StackBench {
  std::string name;  // "generator" or "discriminator"
  std::vector<BackendTiming> backends;  // naive, gauss, block

  const BackendTiming& timing(Backend b) const;
  double node_ratio(Backend numerator, Backend denominator) const;
};

struct BenchReport {
  BenchOptions options;
  StackBench generator;
  StackBench discriminator;
};

BenchReport run_bench(const BenchOptions& options);

// Node counts alone (one forward pass per backend, no timing).
StackBench count_nodes(const BenchOptions& options, bool generator);

}  // namespace cvnn
