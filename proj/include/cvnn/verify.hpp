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

// Backend-equivalence and finite-difference checks over random layer
// configurations.
//
// Linear and convolution layers are run under every backend on the same
// inputs and upstream gradient; each pair of backends is compared on the
// forward output and on the input, weight and bias gradients. Layer norm
// and phase quantization have a single implementation, so their forward
// output is compared with an independent reference instead.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cvnn {

inline constexpr const char* kVerifyLayers[] = {"linear", "conv1d", "conv2d", "layernorm", "pq"};

// Maximum absolute difference of one metric for one layer type and one pair
// of implementations, over all trials.
struct VerifyRow {
  std::string layer;   // linear, conv1d, conv2d, layernorm, pq
  std::string metric;  // Forward output, Input gradient, Weight gradient, Bias gradient
  std::string pair;    // e.g. "naive/gauss" or "tape/reference"
  double max_abs_diff = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_abs_diff <= tolerance; }
};

// Largest relative error of tape gradients against central differences.
struct GradcheckRow {
  std::string layer;
  std::string backend;  // "-" for layers without backends
  double max_rel_error = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_rel_error <= tolerance; }
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 100;           // random configurations per layer type
  std::size_t gradcheck_trials = 3;   // of those, how many also get a finite-difference check
  double forward_tolerance = 1e-10;
  double gradient_tolerance = 1e-8;
  double gradcheck_tolerance = 1e-5;
  double fd_step = 1e-5;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<VerifyRow> rows;
  std::vector<GradcheckRow> gradchecks;
  double seconds = 0.0;

  bool passed() const;
  // Human-readable description of the first breach, naming the layer and
  // the implementations involved.
  std::optional<std::string> first_failure() const;
};

// trials == 0 yields an empty report.
VerifyReport run_verify(const VerifyOptions& options);

}  // namespace cvnn
