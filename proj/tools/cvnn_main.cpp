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

// cvnn verify | bench | toygan | smoke

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cvnn/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Complex-valued network toolkit: backend verification, benchmarks, experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  bool deterministic = false;
  bool emit_json = false;
  app.add_option("--seed", seed, "Base random seed");
  app.add_flag("--deterministic", deterministic, "Run everything on one thread");
  app.add_flag("--json", emit_json, "Print the JSON report to stdout instead of a summary");

  cvnn::VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Backend equivalence and gradient checks");
  verify_cmd->add_option("--trials", verify.trials, "Random configurations per layer type");

  cvnn::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Node counts and forward/backward timings");
  bench_cmd->add_option("--repeats", bench.repeats, "Timed repeats per backend (>= 3)");

  cvnn::ToyGanOptions toygan;
  std::size_t gan_steps = toygan.gan.steps;
  auto* toygan_cmd = app.add_subcommand("toygan", "CVNN vs RVNN GAN on the spiral distribution");
  toygan_cmd->add_option("--seeds", toygan.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  toygan_cmd->add_option("--steps", gan_steps, "Training steps per run");
  toygan_cmd->add_option("--out", toygan.out_dir, "Output directory");
  toygan_cmd->add_flag("--force", toygan.force, "Overwrite existing outputs");

  cvnn::SmokeOptions smoke;
  std::string config_path;
  std::size_t smoke_steps = 0;
  auto* smoke_cmd = app.add_subcommand("smoke", "Mini-vocoder overfit smoke test");
  auto* config_opt = smoke_cmd->add_option("--config", config_path, "INI config file");
  auto* steps_opt = smoke_cmd->add_option("--steps", smoke_steps, "Override [train] steps");
  smoke_cmd->add_option("--out", smoke.out_dir, "Output directory");
  smoke_cmd->add_flag("--force", smoke.force, "Overwrite existing outputs");

  CLI11_PARSE(app, argc, argv);

  try {
    cvnn::set_deterministic(deterministic);
    const bool seed_given = app.count("--seed") > 0;
    cvnn::CommandResult result;
    if (verify_cmd->parsed()) {
      verify.seed = seed;
      result = cvnn::cmd_verify(verify);
    } else if (bench_cmd->parsed()) {
      bench.seed = seed;
      result = cvnn::cmd_bench(bench);
    } else if (toygan_cmd->parsed()) {
      toygan.first_seed = seed;
      toygan.gan.steps = gan_steps;
      result = cvnn::cmd_toygan(toygan);
    } else {
      if (config_opt->count() > 0) smoke.config = config_path;
      if (steps_opt->count() > 0) smoke.steps = smoke_steps;
      if (seed_given) smoke.seed = seed;
      result = cvnn::cmd_smoke(smoke);
    }
    if (emit_json) {
      std::cout << result.report.dump(2) << '\n';
    } else {
      std::cout << result.summary;
    }
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "cvnn: error: " << e.what() << '\n';
    return cvnn::kExitUsage;
  }
}
