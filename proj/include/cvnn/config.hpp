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

// Flat "key = value" config files with [section] headers. '#' and ';' start
// comments. Errors carry "origin:line:" prefixes.
//
//   [model]   layers, dim, pq_levels
//   [stft]    n_fft, hop, win_length, n_mels, sample_rate, f_max
//   [train]   steps, lr, lr_final, seed, wave_samples

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "cvnn/experiments.hpp"

namespace cvnn {

struct IniEntry {
  std::string value;
  std::size_t line = 0;
};

struct IniFile {
  std::string origin;  // file name used in diagnostics
  std::map<std::string, std::map<std::string, IniEntry>> sections;
};

// Throws std::runtime_error on syntax errors and duplicate keys.
IniFile parse_ini(std::string_view text, const std::string& origin);
IniFile read_ini(const std::filesystem::path& path);

// Starts from the defaults and applies every entry. Unknown sections or keys
// and malformed numbers throw std::runtime_error naming the line and field.
MiniVocoderConfig vocoder_config_from_ini(const IniFile& ini);

}  // namespace cvnn
