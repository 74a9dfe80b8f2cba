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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cvnn/commands.hpp"
#include "cvnn/config.hpp"
#include "cvnn/io.hpp"

namespace cvnn {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cvnn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

// Strips wall-clock fields so reports can be compared across runs.
json without_timings(json j) {
  if (j.is_object()) {
    j.erase("seconds");
    for (auto& [k, v] : j.items()) v = without_timings(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = without_timings(v);
  }
  return j;
}

// ---- verify -----------------------------------------------------------------------

TEST(Verify, DefaultTolerancesHoldAndRowsAreNamed) {
  VerifyOptions o;
  o.trials = 20;
  const VerifyReport r = run_verify(o);
  EXPECT_TRUE(r.passed()) << r.first_failure().value_or("");
  std::set<std::string> layers, metrics;
  for (const VerifyRow& row : r.rows) {
    layers.insert(row.layer);
    metrics.insert(row.metric);
    EXPECT_GE(row.max_abs_diff, 0.0);
    EXPECT_TRUE(std::isfinite(row.max_abs_diff));
  }
  EXPECT_EQ(layers, (std::set<std::string>{"linear", "conv1d", "conv2d", "layernorm", "pq"}));
  EXPECT_EQ(metrics, (std::set<std::string>{"Forward output", "Input gradient", "Weight gradient",
                                            "Bias gradient"}));
  EXPECT_EQ(r.gradchecks.size(), 3u * 3u + 2u);
  for (const GradcheckRow& g : r.gradchecks) EXPECT_LE(g.max_rel_error, 1e-5) << g.layer;
}

TEST(Verify, ZeroTrialsGivesEmptyReport) {
  VerifyOptions o;
  o.trials = 0;
  const CommandResult res = cmd_verify(o);
  EXPECT_EQ(res.exit_code, kExitOk);
  EXPECT_TRUE(res.report["rows"].empty());
  EXPECT_TRUE(res.report["gradchecks"].empty());
  EXPECT_TRUE(res.report["passed"].get<bool>());
}

TEST(Verify, CorruptedGaussIdentityIsNamed) {
  testing::set_gauss_linear_fault(true);
  VerifyOptions o;
  o.trials = 5;
  const CommandResult res = cmd_verify(o);
  testing::set_gauss_linear_fault(false);
  EXPECT_EQ(res.exit_code, kExitCheckFailed);
  const std::string failure = res.report["failure"].get<std::string>();
  EXPECT_NE(failure.find("linear"), std::string::npos) << failure;
  EXPECT_NE(failure.find("gauss"), std::string::npos) << failure;
  EXPECT_NE(res.summary.find("FAIL"), std::string::npos);
  // Conv layers are unaffected by the linear fault.
  for (const auto& row : res.report["rows"]) {
    if (row["layer"] != "linear") {
      EXPECT_TRUE(row["passed"].get<bool>()) << row.dump();
    }
  }
}

TEST(Verify, ReportIsReproducible) {
  VerifyOptions o;
  o.trials = 10;
  o.seed = 42;
  EXPECT_EQ(without_timings(cmd_verify(o).report), without_timings(cmd_verify(o).report));
}

// ---- bench ------------------------------------------------------------------------

TEST(Bench, NodeRatiosOnBothStacks) {
  const BenchOptions o;
  const StackBench gen = count_nodes(o, true);
  const StackBench disc = count_nodes(o, false);
  EXPECT_LE(gen.node_ratio(Backend::Block, Backend::Naive), 0.50);
  EXPECT_LE(disc.node_ratio(Backend::Block, Backend::Naive), 0.40);
  EXPECT_GT(gen.timing(Backend::Gauss).nodes, gen.timing(Backend::Naive).nodes);
  // Node counts depend only on the configuration.
  EXPECT_EQ(count_nodes(o, true).timing(Backend::Block).nodes, gen.timing(Backend::Block).nodes);
}

TEST(Bench, SmallRunReportsPositiveTimes) {
  BenchOptions o;
  o.repeats = 3;
  o.warmup = 0;
  o.gen_blocks = 1;
  o.gen_frames = 16;
  o.disc_scales = 1;
  o.disc_layers = 2;
  const BenchReport r = run_bench(o);
  for (const StackBench* s : {&r.generator, &r.discriminator}) {
    ASSERT_EQ(s->backends.size(), 3u);
    for (const BackendTiming& t : s->backends) {
      EXPECT_EQ(t.backward_times.size(), 3u);
      EXPECT_GT(t.forward_median, 0.0);
      EXPECT_GT(t.backward_median, 0.0);
    }
  }
  const json j = to_json(r);
  EXPECT_EQ(j["generator"]["backends"].size(), 3u);
  o.repeats = 2;
  EXPECT_THROW(run_bench(o), std::invalid_argument);
}

// ---- config -----------------------------------------------------------------------

TEST(Config, ParsesSectionsAndOverridesDefaults) {
  const IniFile ini = parse_ini(
      "# mini vocoder\n[model]\nlayers = 3\npq_levels = 128 ; quantized\n\n[stft]\n"
      "n_fft=512\nhop = 128\nwin_length = 512\n[train]\nlr = 2e-3\nsteps = 10\n",
      "a.ini");
  EXPECT_EQ(ini.sections.at("model").at("layers").line, 3u);
  const MiniVocoderConfig c = vocoder_config_from_ini(ini);
  EXPECT_EQ(c.layers, 3u);
  EXPECT_EQ(c.pq_levels, 128);
  EXPECT_EQ(c.n_fft, 512u);
  EXPECT_EQ(c.hop, 128u);
  EXPECT_EQ(c.steps, 10u);
  EXPECT_DOUBLE_EQ(c.lr, 2e-3);
  EXPECT_EQ(c.dim, MiniVocoderConfig{}.dim);
}

void expect_config_error(const std::string& text, const std::string& fragment) {
  try {
    vocoder_config_from_ini(parse_ini(text, "bad.ini"));
    ADD_FAILURE() << "expected an error containing '" << fragment << "'";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Config, DiagnosticsNameLineAndField) {
  expect_config_error("[model]\nlayers = 2\nwidth = 3\n", "bad.ini:3: [model] width: unknown key");
  expect_config_error("[train]\nsteps = many\n", "bad.ini:2: [train] steps: expected");
  expect_config_error("[train]\nlr = 1e-3x\n", "bad.ini:2: [train] lr:");
  expect_config_error("[train]\nsteps = -5\n", "bad.ini:2:");
  expect_config_error("[model]\nlayers 2\n", "bad.ini:2: expected 'key = value'");
  expect_config_error("layers = 2\n", "bad.ini:1: key outside");
  expect_config_error("[model\n", "bad.ini:1: malformed section");
  expect_config_error("[model]\ndim = 4\ndim = 5\n", "bad.ini:3: [model] dim: duplicate key");
  expect_config_error("[optimizer]\nlr = 1\n", "bad.ini:2: unknown section [optimizer]");
  expect_config_error("[train]\nlr = 0\n", "bad.ini: MiniVocoderConfig");
  EXPECT_THROW(read_ini("/nonexistent/x.ini"), std::runtime_error);
}

// ---- toygan -----------------------------------------------------------------------

ToyGanOptions tiny_toygan(const fs::path& out, std::size_t seeds) {
  ToyGanOptions o;
  o.seeds = seeds;
  o.gan.complex_hidden = 8;
  o.gan.steps = 3;
  o.gan.batch = 16;
  o.gan.eval_samples = 500;
  o.gan.log_every = 1;
  o.spiral.n_samples = 1000;
  o.out_dir = out;
  return o;
}

TEST_F(CliTest, ToyGanWritesCsvsAndSummary) {
  const fs::path out = dir_ / "new" / "nested";  // created on demand
  const CommandResult res = cmd_toygan(tiny_toygan(out, 2));
  EXPECT_EQ(res.exit_code, kExitOk);
  for (const char* mode : {"cvnn", "rvnn"}) {
    for (int seed : {0, 1}) {
      const std::string stem = std::string(mode) + "_seed" + std::to_string(seed);
      const CsvTable samples = read_csv(out / ("samples_" + stem + ".csv"));
      EXPECT_EQ(samples.header, (std::vector<std::string>{"re", "im", "mag", "phase"}));
      ASSERT_EQ(samples.rows.size(), 500u);
      const auto& row = samples.rows[7];
      EXPECT_NEAR(row[2], std::hypot(row[0], row[1]), 1e-12);
      EXPECT_NEAR(row[3], std::atan2(row[1], row[0]), 1e-12);
      const CsvTable losses = read_csv(out / ("losses_" + stem + ".csv"));
      EXPECT_EQ(losses.header, (std::vector<std::string>{"step", "d_loss", "g_loss"}));
      EXPECT_EQ(losses.rows.size(), 3u);
    }
  }
  const json summary = read_json(out / "summary.json");
  EXPECT_EQ(summary["runs"].size(), 4u);
  EXPECT_TRUE(summary["same_optimization"].get<bool>());
  EXPECT_FALSE(summary["summary"]["cvnn"]["std_jsd_mag"].is_null());
  for (const auto& run : summary["runs"]) {
    const double m = run["jsd_mag"].get<double>();
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, std::log(2.0));
  }
}

TEST_F(CliTest, ToyGanSingleSeedHasNoSpread) {
  const CommandResult res = cmd_toygan(tiny_toygan(dir_, 1));
  EXPECT_EQ(res.exit_code, kExitOk);
  EXPECT_EQ(res.report["runs"].size(), 2u);
  EXPECT_TRUE(res.report["summary"]["cvnn"]["std_jsd_phase"].is_null());
  EXPECT_EQ(res.summary.find("±"), std::string::npos) << res.summary;
}

TEST_F(CliTest, ToyGanRefusesToOverwrite) {
  ToyGanOptions o = tiny_toygan(dir_, 1);
  ASSERT_EQ(cmd_toygan(o).exit_code, kExitOk);
  const auto stamp = fs::last_write_time(dir_ / "summary.json");
  EXPECT_THROW(cmd_toygan(o), std::runtime_error);
  EXPECT_EQ(fs::last_write_time(dir_ / "summary.json"), stamp);
  o.force = true;
  EXPECT_EQ(cmd_toygan(o).exit_code, kExitOk);
}

TEST_F(CliTest, ToyGanDeterministicReportsMatch) {
  set_deterministic(true);
  ToyGanOptions o = tiny_toygan(dir_, 2);
  o.force = true;
  const json a = without_timings(cmd_toygan(o).report);
  const json b = without_timings(cmd_toygan(o).report);
  set_deterministic(false);
  EXPECT_EQ(a, b);
}

// ---- smoke ------------------------------------------------------------------------

const char* kTinySmoke =
    "[model]\nlayers = 1\ndim = 8\n[stft]\nn_fft = 64\nhop = 16\nwin_length = 64\nn_mels = 8\n"
    "[train]\nsteps = 40\nwave_samples = 4096\n";

TEST_F(CliTest, SmokeTrainsAndWritesOutputs) {
  SmokeOptions o;
  o.config = write_file("tiny.ini", kTinySmoke);
  o.out_dir = dir_ / "out";
  const CommandResult res = cmd_smoke(o);
  EXPECT_EQ(res.exit_code, kExitOk) << res.summary;
  const CsvTable losses = read_csv(o.out_dir / "smoke_loss.csv");
  EXPECT_EQ(losses.header, (std::vector<std::string>{"step", "mel_l1"}));
  ASSERT_EQ(losses.rows.size(), 41u);
  EXPECT_LT(losses.rows.back()[1], losses.rows.front()[1]);
  const Wave w = read_wav(o.out_dir / "smoke.wav");
  EXPECT_EQ(w.sample_rate, 24000u);
  EXPECT_EQ(w.samples.numel(), 4096u);
  const json j = read_json(o.out_dir / "smoke.json");
  EXPECT_LT(j["final_mel_l1"].get<double>(), j["initial_mel_l1"].get<double>());
  EXPECT_TRUE(j["passed"].get<bool>());
}

TEST_F(CliTest, SmokeZeroStepsReportsInitialLossOnly) {
  SmokeOptions o;
  o.config = write_file("tiny.ini", kTinySmoke);
  o.steps = 0;
  o.out_dir = dir_;
  const CommandResult res = cmd_smoke(o);
  EXPECT_EQ(res.exit_code, kExitOk);
  EXPECT_GT(res.report["initial_mel_l1"].get<double>(), 0.0);
  EXPECT_TRUE(res.report["final_mel_l1"].is_null());
  EXPECT_EQ(read_csv(dir_ / "smoke_loss.csv").rows.size(), 1u);
}

TEST_F(CliTest, SmokeRejectsMalformedConfig) {
  SmokeOptions o;
  o.config = write_file("bad.ini", "[model]\nlayers = two\n");
  o.out_dir = dir_;
  try {
    cmd_smoke(o);
    FAIL() << "expected a config error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("bad.ini:2: [model] layers"), std::string::npos)
        << e.what();
  }
}

// ---- executable -------------------------------------------------------------------

int run_cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string(CVNN_CLI_PATH) + " " + args + " > " + stdout_file.string() +
                          " 2> " + stdout_file.string() + ".err";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST_F(CliTest, ExecutableExitCodesAndJson) {
  const fs::path out = dir_ / "stdout.txt";
  EXPECT_EQ(run_cli("verify --trials 0 --json --seed 3", out), 0);
  const json j = json::parse(slurp_text(out));
  EXPECT_EQ(j["command"], "verify");
  EXPECT_EQ(j["seed"], 3);

  write_file("bad.ini", "[stft]\nhop = 256\nfoo = 1\n");
  EXPECT_EQ(run_cli("smoke --config " + (dir_ / "bad.ini").string() + " --out " + dir_.string(),
                    out),
            kExitUsage);
  EXPECT_NE(slurp_text(fs::path(out.string() + ".err")).find("bad.ini:3: [stft] foo"),
            std::string::npos);

  EXPECT_NE(run_cli("frobnicate", out), 0);
  EXPECT_NE(run_cli("", out), 0);
}

}  // namespace
}  // namespace cvnn
