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

// The command layer behind the cvnn executable. Each command returns a JSON
// report, a short human-readable summary and an exit code; the executable
// only parses flags and prints.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "cvnn/bench.hpp"
#include "cvnn/experiments.hpp"
#include "cvnn/verify.hpp"
#include "json.hpp"

namespace cvnn {

struct CommandResult {
  int exit_code = 0;
  nlohmann::ordered_json report;
  std::string summary;
};

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // a tolerance or threshold was breached
inline constexpr int kExitUsage = 2;        // bad flags, config or output location

// Single-threaded execution everywhere. Runs are already reproducible per
// seed; this only removes concurrency between independent runs.
void set_deterministic(bool enabled);
bool deterministic();

nlohmann::ordered_json to_json(const VerifyReport& report);
nlohmann::ordered_json to_json(const BenchReport& report);
nlohmann::ordered_json to_json(const RunReport& report);
nlohmann::ordered_json to_json(const VocoderReport& report, const MiniVocoderConfig& cfg);

// Exit 0 iff every backend pair and gradient check is within tolerance.
CommandResult cmd_verify(const VerifyOptions& options);

// Node-ratio thresholds for the two stacks and the backward-time ordering.
struct BenchThresholds {
  double generator_ratio = 0.50;
  double discriminator_ratio = 0.40;
};
// Exit 0 iff both Block/Naive node ratios are within the thresholds and the
// median Block backward time does not exceed the Naive one on either stack.
CommandResult cmd_bench(const BenchOptions& options, const BenchThresholds& thresholds = {});

struct ToyGanOptions {
  std::size_t seeds = 10;
  std::uint64_t first_seed = 0;  // runs use first_seed, first_seed + 1, ...
  GanConfig gan;                 // mode and seed are overwritten per run
  SpiralConfig spiral;
  std::filesystem::path out_dir = "toygan_out";
  bool force = false;
};

// Per-seed sample CSVs (re, im, mag, phase), loss CSVs and summary.json.
// Exit 0 unless more than half of the seeds fail.
CommandResult cmd_toygan(const ToyGanOptions& options);

struct SmokeOptions {
  std::optional<std::filesystem::path> config;  // INI; defaults when absent
  std::optional<std::size_t> steps;             // overrides [train] steps
  std::optional<std::uint64_t> seed;            // overrides [train] seed
  std::filesystem::path out_dir = "smoke_out";
  bool force = false;
};

// Writes smoke_loss.csv, smoke.wav and smoke.json. Exit 1 when training
// diverges or the loss ends no lower than it started.
CommandResult cmd_smoke(const SmokeOptions& options);

}  // namespace cvnn
