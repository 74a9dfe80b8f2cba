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

// On-disk formats: parameter containers, PCM16 WAV and RFC 4180 CSV.
//
// Parameter container layout (all integers little-endian):
//
//   "CVNNPRM1"                     8-byte magic
//   u32 version                    currently 1
//   u32 count
//   count x { u32 name_len, name bytes (UTF-8), u32 rank, rank x u64 dim }
//   count x { real plane, imag plane }  as IEEE-754 binary64, manifest order

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cvnn/autograd.hpp"
#include "cvnn/ctensor.hpp"

namespace cvnn {

inline constexpr std::uint32_t kParamFormatVersion = 1;

std::vector<std::uint8_t> encode_parameters(std::span<const Parameter* const> params);
// Throws std::runtime_error on bad magic, unsupported version or truncation.
std::vector<Parameter> decode_parameters(std::span<const std::uint8_t> bytes);

void save_parameters(const std::filesystem::path& path, std::span<const Parameter* const> params);
std::vector<Parameter> load_parameters(const std::filesystem::path& path);
// Loads values into existing parameters, matching by position; names and
// shapes must agree.
void load_parameters_into(const std::filesystem::path& path, std::span<Parameter* const> params);

struct Wave {
  RTensor samples;  // [T], nominally in [-1, 1]
  std::uint32_t sample_rate = 0;
};

// RIFF/WAVE, PCM 16-bit, mono. Samples are clipped to [-1, 1] and scaled by 32767.
void write_wav(const std::filesystem::path& path, const RTensor& samples,
               std::uint32_t sample_rate);
// Accepts only PCM 16-bit mono; anything else throws std::runtime_error.
Wave read_wav(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// CRLF line endings; fields quoted when they contain separators or quotes.
// Numbers use 17 significant digits so they re-read exactly.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// Throws std::runtime_error if `path` exists and `force` is false.
void ensure_writable(const std::filesystem::path& path, bool force);

}  // namespace cvnn
