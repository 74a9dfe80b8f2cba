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

#include "cvnn/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace cvnn {

namespace {

constexpr char kMagic[8] = {'C', 'V', 'N', 'N', 'P', 'R', 'M', '1'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t>& data() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, std::string what) : in_(in), what_(std::move(what)) {}

  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) {
      throw std::runtime_error(what_ + ": truncated at byte " + std::to_string(pos_));
    }
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  void skip(std::size_t n) { bytes(n); }
  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

// ---- parameter container -------------------------------------------------------

std::vector<std::uint8_t> encode_parameters(std::span<const Parameter* const> params) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kParamFormatVersion);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const Parameter* p : params) {
    w.u32(static_cast<std::uint32_t>(p->name.size()));
    w.bytes(p->name.data(), p->name.size());
    const Shape& s = p->value.shape();
    w.u32(static_cast<std::uint32_t>(s.rank()));
    for (std::size_t d : s.dims()) w.u64(d);
  }
  for (const Parameter* p : params) {
    for (double v : p->value.real()) w.f64(v);
    for (double v : p->value.imag()) w.f64(v);
  }
  return std::move(w.data());
}

std::vector<Parameter> decode_parameters(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "parameter container");
  const auto magic = r.bytes(sizeof(kMagic));
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw std::runtime_error("parameter container: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kParamFormatVersion) {
    throw std::runtime_error("parameter container: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  std::vector<Parameter> params;
  std::vector<Shape> shapes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = r.u32();
    const auto name = r.bytes(len);
    const std::uint32_t rank = r.u32();
    if (rank > 16) throw std::runtime_error("parameter container: implausible rank");
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) d = static_cast<std::size_t>(r.u64());
    params.emplace_back(std::string(name.begin(), name.end()), CTensor());
    shapes.emplace_back(std::move(dims));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t n = shapes[i].numel();
    r.need(16 * n);
    std::vector<double> re(n), im(n);
    for (double& v : re) v = r.f64();
    for (double& v : im) v = r.f64();
    params[i].value = CTensor(shapes[i], std::move(re), std::move(im));
  }
  if (r.remaining() != 0) throw std::runtime_error("parameter container: trailing bytes");
  return params;
}

void save_parameters(const std::filesystem::path& path, std::span<const Parameter* const> params) {
  write_file(path, encode_parameters(params));
}

std::vector<Parameter> load_parameters(const std::filesystem::path& path) {
  return decode_parameters(read_file(path));
}

void load_parameters_into(const std::filesystem::path& path, std::span<Parameter* const> params) {
  std::vector<Parameter> loaded = load_parameters(path);
  if (loaded.size() != params.size()) {
    throw std::runtime_error("load_parameters_into: file holds " + std::to_string(loaded.size()) +
                             " parameters, model has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    if (loaded[i].name != params[i]->name ||
        !(loaded[i].value.shape() == params[i]->value.shape())) {
      throw std::runtime_error("load_parameters_into: entry " + std::to_string(i) + " is '" +
                               loaded[i].name + "' " + loaded[i].value.shape().str() +
                               ", expected '" + params[i]->name + "' " +
                               params[i]->value.shape().str());
    }
    params[i]->value = std::move(loaded[i].value);
  }
}

// ---- WAV ------------------------------------------------------------------------

void write_wav(const std::filesystem::path& path, const RTensor& samples,
               std::uint32_t sample_rate) {
  if (sample_rate == 0) throw std::invalid_argument("write_wav: sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(samples.numel() * 2);
  Writer w;
  w.bytes("RIFF", 4);
  w.u32(36 + data_bytes);
  w.bytes("WAVE", 4);
  w.bytes("fmt ", 4);
  w.u32(16);
  w.u16(1);  // PCM
  w.u16(1);  // mono
  w.u32(sample_rate);
  w.u32(sample_rate * 2);
  w.u16(2);
  w.u16(16);
  w.bytes("data", 4);
  w.u32(data_bytes);
  for (double v : samples.data()) {
    const double c = std::clamp(std::isfinite(v) ? v : 0.0, -1.0, 1.0);
    w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32767.0))));
  }
  write_file(path, w.data());
}

Wave read_wav(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  Reader r(bytes, "WAV " + path.string());
  auto tag = [&r]() {
    const auto b = r.bytes(4);
    return std::string(b.begin(), b.end());
  };
  if (tag() != "RIFF") throw std::runtime_error(path.string() + ": not a RIFF file");
  r.u32();
  if (tag() != "WAVE") throw std::runtime_error(path.string() + ": not a WAVE file");
  bool have_fmt = false;
  Wave wave;
  while (r.remaining() >= 8) {
    const std::string id = tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      if (size < 16) throw std::runtime_error(path.string() + ": short fmt chunk");
      const std::uint16_t format = r.u16();
      const std::uint16_t channels = r.u16();
      wave.sample_rate = r.u32();
      r.u32();
      r.u16();
      const std::uint16_t bits = r.u16();
      r.skip(size - 16 + (size & 1));
      if (format != 1 || bits != 16) {
        throw std::runtime_error(path.string() + ": unsupported encoding (format " +
                                 std::to_string(format) + ", " + std::to_string(bits) +
                                 " bits); only PCM 16-bit is supported");
      }
      if (channels != 1) {
        throw std::runtime_error(path.string() + ": " + std::to_string(channels) +
                                 " channels; only mono is supported");
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw std::runtime_error(path.string() + ": data chunk before fmt chunk");
      const std::size_t n = size / 2;
      RTensor s(Shape{n});
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(static_cast<std::int16_t>(r.u16())) / 32767.0;
      }
      wave.samples = std::move(s);
      return wave;
    } else {
      r.skip(size + (size & 1));
    }
  }
  throw std::runtime_error(path.string() + ": no data chunk");
}

// ---- CSV ------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Splits one record; handles quoted fields (no embedded newlines in rows
// produced by this library).
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    f << (i ? "," : "") << csv_field(table.header[i]);
  }
  f << "\r\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw std::invalid_argument("write_csv: row width " + std::to_string(row.size()) +
                                  " does not match header width " +
                                  std::to_string(table.header.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_number(row[i]);
    f << "\r\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_record(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " fields, found " +
                               std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (const std::string& s : fields) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || s.empty()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": not a number: '" + s + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void ensure_writable(const std::filesystem::path& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw std::runtime_error(path.string() + " already exists; pass --force to overwrite");
  }
}

}  // namespace cvnn
