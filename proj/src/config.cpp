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

#include "cvnn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace cvnn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& what) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

std::size_t to_size(const IniFile& ini, const std::string& section, const std::string& key,
                    const IniEntry& e) {
  std::size_t v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    fail(ini.origin, e.line,
         "[" + section + "] " + key + ": expected a non-negative integer, got '" + e.value + "'");
  }
  return v;
}

double to_double(const IniFile& ini, const std::string& section, const std::string& key,
                 const IniEntry& e) {
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    fail(ini.origin, e.line,
         "[" + section + "] " + key + ": expected a finite number, got '" + e.value + "'");
  }
  return v;
}

}  // namespace

IniFile parse_ini(std::string_view text, const std::string& origin) {
  IniFile ini;
  ini.origin = origin;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(origin, line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(origin, line_no, "expected 'key = value'");
    if (section.empty()) fail(origin, line_no, "key outside of any [section]");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(origin, line_no, "empty key");
    if (value.empty()) fail(origin, line_no, "[" + section + "] " + key + ": empty value");
    auto [it, inserted] = ini.sections[section].emplace(key, IniEntry{value, line_no});
    if (!inserted) {
      fail(origin, line_no,
           "[" + section + "] " + key + ": duplicate key (first set on line " +
               std::to_string(it->second.line) + ")");
    }
  }
  return ini;
}

IniFile read_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open config");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_ini(text.str(), path.string());
}

MiniVocoderConfig vocoder_config_from_ini(const IniFile& ini) {
  MiniVocoderConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&, const IniEntry&)>;
  auto size_field = [&](std::size_t& field) -> Setter {
    return [&](const std::string& s, const std::string& k, const IniEntry& e) {
      field = to_size(ini, s, k, e);
    };
  };
  auto double_field = [&](double& field) -> Setter {
    return [&](const std::string& s, const std::string& k, const IniEntry& e) {
      field = to_double(ini, s, k, e);
    };
  };
  const std::map<std::string, std::map<std::string, Setter>> schema = {
      {"model",
       {{"layers", size_field(cfg.layers)},
        {"dim", size_field(cfg.dim)},
        {"pq_levels",
         [&](const std::string& s, const std::string& k, const IniEntry& e) {
           cfg.pq_levels = static_cast<int>(to_size(ini, s, k, e));
         }}}},
      {"stft",
       {{"n_fft", size_field(cfg.n_fft)},
        {"hop", size_field(cfg.hop)},
        {"win_length", size_field(cfg.win_length)},
        {"n_mels", size_field(cfg.n_mels)},
        {"sample_rate", double_field(cfg.sample_rate)},
        {"f_max", double_field(cfg.f_max)}}},
      {"train",
       {{"steps", size_field(cfg.steps)},
        {"lr", double_field(cfg.lr)},
        {"lr_final", double_field(cfg.lr_final)},
        {"wave_samples", size_field(cfg.wave_samples)},
        {"seed",
         [&](const std::string& s, const std::string& k, const IniEntry& e) {
           cfg.seed = to_size(ini, s, k, e);
         }}}},
  };
  for (const auto& [section, entries] : ini.sections) {
    const auto known = schema.find(section);
    for (const auto& [key, entry] : entries) {
      if (known == schema.end()) fail(ini.origin, entry.line, "unknown section [" + section + "]");
      const auto setter = known->second.find(key);
      if (setter == known->second.end()) {
        fail(ini.origin, entry.line, "[" + section + "] " + key + ": unknown key");
      }
      setter->second(section, key, entry);
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(ini.origin + ": " + e.what());
  }
  return cfg;
}

}  // namespace cvnn
