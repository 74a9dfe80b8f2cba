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

#include "cvnn/commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cvnn/config.hpp"
#include "cvnn/io.hpp"

namespace cvnn {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

std::atomic<bool> g_deterministic{false};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Sample standard deviation; NaN below two values.
double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return std::nan("");
  double mu = 0.0;
  for (double x : v) mu += x / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// JSON has no NaN; missing statistics become null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": cannot create directory: " + ec.message());
}

json gan_config_json(const GanConfig& g) {
  return {{"complex_hidden", g.complex_hidden}, {"depth", g.depth},
          {"leaky_slope", g.leaky_slope},       {"steps", g.steps},
          {"lr", g.lr},                         {"beta1", g.beta1},
          {"beta2", g.beta2},                   {"batch", g.batch},
          {"eval_samples", g.eval_samples},     {"backend", to_string(g.backend)}};
}

json spiral_config_json(const SpiralConfig& s) {
  return {{"n_samples", s.n_samples}, {"turns", s.turns}, {"a", s.a},
          {"b", s.b},                 {"sigma", s.sigma}, {"seed", s.seed}};
}

}  // namespace

void set_deterministic(bool enabled) {
  g_deterministic = enabled;
  if (enabled) Eigen::setNbThreads(1);
}

bool deterministic() { return g_deterministic; }

// ---- reports ----------------------------------------------------------------------

json to_json(const VerifyReport& r) {
  json rows = json::array();
  for (const VerifyRow& row : r.rows) {
    rows.push_back({{"layer", row.layer},
                    {"metric", row.metric},
                    {"pair", row.pair},
                    {"max_abs_diff", row.max_abs_diff},
                    {"tolerance", row.tolerance},
                    {"passed", row.passed()}});
  }
  json checks = json::array();
  for (const GradcheckRow& c : r.gradchecks) {
    checks.push_back({{"layer", c.layer},
                      {"backend", c.backend},
                      {"max_rel_error", c.max_rel_error},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed()}});
  }
  const std::optional<std::string> failure = r.first_failure();
  return {{"command", "verify"},
          {"seed", r.options.seed},
          {"trials", r.options.trials},
          {"gradcheck_trials", std::min(r.options.gradcheck_trials, r.options.trials)},
          {"rows", rows},
          {"gradchecks", checks},
          {"passed", r.passed()},
          {"failure", failure ? json(*failure) : json(nullptr)},
          {"seconds", r.seconds}};
}

namespace {

json stack_json(const StackBench& s) {
  json backends = json::array();
  for (const BackendTiming& t : s.backends) {
    backends.push_back({{"backend", to_string(t.backend)},
                        {"nodes", t.nodes},
                        {"forward_median_s", t.forward_median},
                        {"backward_median_s", t.backward_median},
                        {"forward_s", t.forward_times},
                        {"backward_s", t.backward_times}});
  }
  return {{"name", s.name},
          {"backends", backends},
          {"node_ratio_block_naive", s.node_ratio(Backend::Block, Backend::Naive)},
          {"node_ratio_gauss_naive", s.node_ratio(Backend::Gauss, Backend::Naive)}};
}

}  // namespace

json to_json(const BenchReport& r) {
  const BenchOptions& o = r.options;
  return {{"command", "bench"},
          {"config",
           {{"seed", o.seed},
            {"repeats", o.repeats},
            {"warmup", o.warmup},
            {"gen_blocks", o.gen_blocks},
            {"gen_channels", o.gen_channels},
            {"gen_dim", o.gen_dim},
            {"gen_frames", o.gen_frames},
            {"disc_scales", o.disc_scales},
            {"disc_layers", o.disc_layers},
            {"disc_channels", o.disc_channels}}},
          {"generator", stack_json(r.generator)},
          {"discriminator", stack_json(r.discriminator)}};
}

json to_json(const RunReport& r) {
  return {{"mode", to_string(r.mode)},
          {"seed", r.seed},
          {"steps", r.steps},
          {"failed", r.failed},
          {"failure", r.failed ? json(r.failure) : json(nullptr)},
          {"jsd_mag", r.failed ? json(nullptr) : json(r.jsd_mag)},
          {"jsd_phase", r.failed ? json(nullptr) : json(r.jsd_phase)},
          {"generator_parameters", r.generator_parameters},
          {"final_d_loss", r.d_loss.empty() ? json(nullptr) : number_or_null(r.d_loss.back())},
          {"final_g_loss", r.g_loss.empty() ? json(nullptr) : number_or_null(r.g_loss.back())},
          {"seconds", r.seconds}};
}

json to_json(const VocoderReport& r, const MiniVocoderConfig& c) {
  const double drop = r.initial_loss > 0.0 ? 1.0 - r.final_loss / r.initial_loss : 0.0;
  // With zero steps only the initial loss is meaningful.
  const bool trained = c.steps > 0 && !r.diverged;
  return {{"command", "smoke"},
          {"config",
           {{"layers", c.layers},
            {"dim", c.dim},
            {"pq_levels", c.pq_levels},
            {"n_fft", c.n_fft},
            {"hop", c.hop},
            {"win_length", c.win_length},
            {"n_mels", c.n_mels},
            {"sample_rate", c.sample_rate},
            {"f_max", c.f_max},
            {"steps", c.steps},
            {"lr", c.lr},
            {"lr_final", c.lr_final},
            {"wave_samples", c.wave_samples},
            {"seed", c.seed}}},
          {"initial_mel_l1", number_or_null(r.initial_loss)},
          {"final_mel_l1", trained ? number_or_null(r.final_loss) : json(nullptr)},
          {"drop_fraction", trained ? number_or_null(drop) : json(nullptr)},
          {"mr_stft_error", trained ? number_or_null(r.mr_stft) : json(nullptr)},
          {"diverged", r.diverged},
          {"seconds", r.seconds}};
}

// ---- verify -------------------------------------------------------------------------

CommandResult cmd_verify(const VerifyOptions& options) {
  CommandResult res;
  const VerifyReport report = run_verify(options);
  res.report = to_json(report);
  std::ostringstream s;
  s << "verify: " << options.trials << " random configs per layer type, seed " << options.seed
    << "\n";
  for (const VerifyRow& r : report.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-10s %-16s %-15s %10.3e  (tol %.0e)%s\n", r.layer.c_str(),
                  r.metric.c_str(), r.pair.c_str(), r.max_abs_diff, r.tolerance,
                  r.passed() ? "" : "  FAIL");
    s << line;
  }
  for (const GradcheckRow& g : report.gradchecks) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-10s %-16s %-15s %10.3e  (tol %.0e)%s\n", g.layer.c_str(),
                  "Gradient check", g.backend.c_str(), g.max_rel_error, g.tolerance,
                  g.passed() ? "" : "  FAIL");
    s << line;
  }
  if (const auto failure = report.first_failure()) {
    s << "FAILED: " << *failure << "\n";
    res.exit_code = kExitCheckFailed;
  } else {
    s << "all checks passed in " << format("%.1f", report.seconds) << " s\n";
  }
  res.summary = s.str();
  return res;
}

// ---- bench --------------------------------------------------------------------------

CommandResult cmd_bench(const BenchOptions& options, const BenchThresholds& thresholds) {
  CommandResult res;
  const BenchReport report = run_bench(options);
  res.report = to_json(report);
  json checks = json::array();
  bool ok = true;
  auto check = [&](const std::string& name, double value, double limit) {
    const bool passed = value <= limit;
    ok = ok && passed;
    checks.push_back({{"check", name}, {"value", value}, {"limit", limit}, {"passed", passed}});
  };
  check("generator node ratio block/naive", report.generator.node_ratio(Backend::Block, Backend::Naive),
        thresholds.generator_ratio);
  check("discriminator node ratio block/naive",
        report.discriminator.node_ratio(Backend::Block, Backend::Naive),
        thresholds.discriminator_ratio);
  for (const StackBench* s : {&report.generator, &report.discriminator}) {
    check(s->name + " backward median block/naive",
          s->timing(Backend::Block).backward_median / s->timing(Backend::Naive).backward_median, 1.0);
  }
  res.report["checks"] = checks;
  res.report["passed"] = ok;

  std::ostringstream s;
  s << "bench: " << options.repeats << " timed repeats after " << options.warmup
    << " warmup, median seconds\n";
  for (const StackBench* st : {&report.generator, &report.discriminator}) {
    s << "  " << st->name << "\n";
    for (const BackendTiming& t : st->backends) {
      char line[160];
      std::snprintf(line, sizeof line, "    %-6s nodes %6zu  forward %9.5f  backward %9.5f\n",
                    std::string(to_string(t.backend)).c_str(), t.nodes, t.forward_median,
                    t.backward_median);
      s << line;
    }
  }
  for (const json& c : checks) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-42s %.3f (limit %.2f)%s\n",
                  c["check"].get<std::string>().c_str(), c["value"].get<double>(),
                  c["limit"].get<double>(), c["passed"].get<bool>() ? "" : "  FAIL");
    s << line;
  }
  res.summary = s.str();
  res.exit_code = ok ? kExitOk : kExitCheckFailed;
  return res;
}

// ---- toygan -------------------------------------------------------------------------

namespace {

CsvTable sample_table(const CTensor& samples) {
  CsvTable t;
  t.header = {"re", "im", "mag", "phase"};
  for (std::size_t k = 0; k < samples.numel(); ++k) {
    const std::complex<double> z = samples.at(k);
    t.rows.push_back({z.real(), z.imag(), std::abs(z), std::arg(z)});
  }
  return t;
}

CsvTable loss_table(const RunReport& r) {
  CsvTable t;
  t.header = {"step", "d_loss", "g_loss"};
  for (std::size_t i = 0; i < r.logged_steps.size(); ++i) {
    t.rows.push_back({static_cast<double>(r.logged_steps[i]), r.d_loss[i], r.g_loss[i]});
  }
  return t;
}

std::string run_stem(GanMode mode, std::uint64_t seed) {
  return std::string(to_string(mode)) + "_seed" + std::to_string(seed);
}

}  // namespace

CommandResult cmd_toygan(const ToyGanOptions& options) {
  if (options.seeds == 0) throw std::invalid_argument("toygan: need at least one seed");
  const auto start = Clock::now();
  const fs::path& dir = options.out_dir;
  const GanMode modes[] = {GanMode::Cvnn, GanMode::Rvnn};

  // Refuse before any training if an output would be overwritten.
  std::vector<fs::path> outputs{dir / "summary.json"};
  for (std::size_t i = 0; i < options.seeds; ++i) {
    for (GanMode m : modes) {
      const std::string stem = run_stem(m, options.first_seed + i);
      outputs.push_back(dir / ("samples_" + stem + ".csv"));
      outputs.push_back(dir / ("losses_" + stem + ".csv"));
    }
  }
  for (const fs::path& p : outputs) ensure_writable(p, options.force);
  prepare_dir(dir);

  std::vector<GanConfig> configs;
  for (std::size_t i = 0; i < options.seeds; ++i) {
    for (GanMode m : modes) {
      GanConfig g = options.gan;
      g.mode = m;
      g.seed = options.first_seed + i;
      configs.push_back(g);
    }
  }
  for (const GanConfig& g : configs) {
    if (!same_optimization(g, configs.front())) {
      throw std::logic_error("toygan: CVNN and RVNN runs must share optimisation settings");
    }
  }

  const CTensor target = sample_target(options.spiral);
  std::vector<RunReport> reports(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        reports[i] = train_toy_gan(configs[i], target);
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (error.empty()) error = e.what();
      }
    }
  };
  const std::size_t threads =
      deterministic() ? 1
                      : std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, configs.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (!error.empty()) throw std::runtime_error("toygan: " + error);

  json runs = json::array();
  for (const RunReport& r : reports) {
    const std::string stem = run_stem(r.mode, r.seed);
    write_csv(dir / ("samples_" + stem + ".csv"), sample_table(r.samples));
    write_csv(dir / ("losses_" + stem + ".csv"), loss_table(r));
    runs.push_back(to_json(r));
  }

  std::size_t failed_seeds = 0;
  for (std::size_t i = 0; i < options.seeds; ++i) {
    if (reports[2 * i].failed || reports[2 * i + 1].failed) ++failed_seeds;
  }

  json summary = json::object();
  std::ostringstream s;
  s << "toygan: " << options.seeds << " seed(s), " << options.gan.steps << " steps, batch "
    << options.gan.batch << "\n";
  s << "  model  JSD(mag)                JSD(phase)\n";
  for (GanMode m : modes) {
    std::vector<double> mag, phase;
    for (const RunReport& r : reports) {
      if (r.mode != m || r.failed) continue;
      mag.push_back(r.jsd_mag);
      phase.push_back(r.jsd_phase);
    }
    const double mm = median(mag), mp = median(phase), sm = stddev(mag), sp = stddev(phase);
    summary[std::string(to_string(m))] = {{"runs_ok", mag.size()},
                                          {"median_jsd_mag", number_or_null(mm)},
                                          {"median_jsd_phase", number_or_null(mp)},
                                          {"std_jsd_mag", number_or_null(sm)},
                                          {"std_jsd_phase", number_or_null(sp)}};
    auto cell = [](double med, double sd) {
      std::string c = format("%.6f", med);
      if (std::isfinite(sd)) c += " ± " + format("%.6f", sd);
      return c;
    };
    char line[160];
    std::snprintf(line, sizeof line, "  %-5s  %-22s  %s\n",
                  m == GanMode::Cvnn ? "CVNN" : "RVNN", cell(mm, sm).c_str(),
                  cell(mp, sp).c_str());
    s << line;
  }
  s << (options.seeds > 1 ? "  (median ± sample standard deviation over seeds)\n"
                          : "  (single seed, no spread)\n");

  const bool too_many_failures = 2 * failed_seeds > options.seeds;
  CommandResult res;
  res.report = {{"command", "toygan"},
                {"seeds", options.seeds},
                {"first_seed", options.first_seed},
                {"config", gan_config_json(options.gan)},
                {"spiral", spiral_config_json(options.spiral)},
                {"same_optimization", true},
                {"runs", runs},
                {"summary", summary},
                {"failed_seeds", failed_seeds},
                {"seconds", seconds_since(start)}};
  write_json(dir / "summary.json", res.report);
  if (failed_seeds > 0) s << "  " << failed_seeds << " seed(s) failed\n";
  s << "  wrote " << dir.string() << "/summary.json\n";
  res.summary = s.str();
  res.exit_code = too_many_failures ? kExitCheckFailed : kExitOk;
  return res;
}

// ---- smoke --------------------------------------------------------------------------

CommandResult cmd_smoke(const SmokeOptions& options) {
  MiniVocoderConfig cfg;
  if (options.config) cfg = vocoder_config_from_ini(read_ini(*options.config));
  if (options.steps) cfg.steps = *options.steps;
  if (options.seed) cfg.seed = *options.seed;

  const fs::path& dir = options.out_dir;
  const fs::path loss_csv = dir / "smoke_loss.csv", wav = dir / "smoke.wav",
                 report_json = dir / "smoke.json";
  for (const fs::path& p : {loss_csv, wav, report_json}) ensure_writable(p, options.force);
  prepare_dir(dir);

  const VocoderReport r = mini_vocoder_overfit(cfg, default_vocoder_signal(cfg));
  CsvTable losses;
  losses.header = {"step", "mel_l1"};
  for (std::size_t i = 0; i < r.loss.size(); ++i) {
    losses.rows.push_back({static_cast<double>(i), r.loss[i]});
  }
  write_csv(loss_csv, losses);
  if (!r.diverged) {
    write_wav(wav, r.waveform, static_cast<std::uint32_t>(std::lround(cfg.sample_rate)));
  }

  CommandResult res;
  res.report = to_json(r, cfg);
  std::ostringstream s;
  s << "smoke: " << cfg.steps << " steps, N_q = " << cfg.pq_levels << "\n";
  s << "  initial mel-L1 " << format("%.6f", r.initial_loss) << "\n";
  bool ok = !r.diverged;
  if (r.diverged) {
    s << "  training diverged after " << r.loss.size() - 1 << " steps\n";
  } else if (cfg.steps > 0) {
    s << "  final mel-L1   " << format("%.6f", r.final_loss) << " ("
      << format("%.1f", 100.0 * (1.0 - r.final_loss / r.initial_loss)) << "% lower)\n";
    s << "  MR-STFT error  " << format("%.6f", r.mr_stft) << "\n";
    if (!(r.final_loss < r.initial_loss)) {
      s << "  loss did not decrease\n";
      ok = false;
    }
  }
  res.report["passed"] = ok;
  write_json(report_json, res.report);
  s << "  wrote " << dir.string() << "/smoke.json\n";
  res.summary = s.str();
  res.exit_code = ok ? kExitOk : kExitCheckFailed;
  return res;
}

}  // namespace cvnn
