// Copyright 2026 The scspec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scspec/spectrum.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scspec/error.hpp"

namespace scspec {

namespace {

void check_monotonic(const std::vector<double> &v, const std::string &what) {
  if (v.size() < 2) throw InvalidArgument(what + " axis needs at least 2 values", what);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw InvalidArgument(what + " axis value " + std::to_string(i) + " is not finite", what);
  }
  const bool up = v[1] > v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    if ((up && !(v[i] > v[i - 1])) || (!up && !(v[i] < v[i - 1]))) {
      throw InvalidArgument(what + " axis is not strictly monotonic at index " + std::to_string(i),
                            what);
    }
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(std::string_view cell, int row, int col) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    throw ParseError("cannot parse number '" + std::string(cell) + "'", row, col);
  if (!std::isfinite(value)) throw ParseError("non-finite value", row, col);
  return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t &x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

AxisGrid::AxisGrid(std::vector<double> values, std::string label, std::string unit)
    : values_(std::move(values)), label_(std::move(label)), unit_(std::move(unit)) {
  check_monotonic(values_, label_.empty() ? std::string("axis") : label_);
}

AxisGrid AxisGrid::linspace(double first, double last, std::size_t count, std::string label,
                            std::string unit) {
  if (count < 2) throw InvalidArgument("linspace needs at least 2 points");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  v.back() = last;
  return AxisGrid(std::move(v), std::move(label), std::move(unit));
}

std::size_t AxisGrid::nearest_index(double x) const {
  std::size_t best = 0;
  double dist = std::abs(values_[0] - x);
  for (std::size_t i = 1; i < values_.size(); ++i) {
    const double d = std::abs(values_[i] - x);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

double AxisGrid::mean_step() const {
  return std::abs(values_.back() - values_.front()) / static_cast<double>(values_.size() - 1);
}

Spectrum2D::Spectrum2D(AxisGrid bias, AxisGrid freq, Matrix amplitude,
                       std::map<std::string, std::string> metadata)
    : bias_(std::move(bias)),
      freq_(std::move(freq)),
      amplitude_(std::move(amplitude)),
      metadata_(std::move(metadata)) {
  if (amplitude_.rows() != static_cast<Eigen::Index>(freq_.size()) ||
      amplitude_.cols() != static_cast<Eigen::Index>(bias_.size())) {
    throw InvalidArgument("amplitude shape does not match (freq, bias) axes", "amplitude");
  }
  for (Eigen::Index c = 0; c < amplitude_.cols(); ++c) {
    for (Eigen::Index r = 0; r < amplitude_.rows(); ++r) {
      if (!std::isfinite(amplitude_(r, c))) {
        throw InvalidArgument("non-finite amplitude at row " + std::to_string(r) + ", column " +
                                  std::to_string(c),
                              "amplitude");
      }
    }
  }
}

SpectrumFormat format_from_path(const std::filesystem::path &path) {
  return path.extension() == ".json" ? SpectrumFormat::Json : SpectrumFormat::CsvMatrix;
}

Spectrum2D parse_csv_spectrum(const std::string &text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("empty file");

  const auto header = split_commas(lines[0]);
  if (header[0] != "freq\\bias")
    throw ParseError("first cell must be the literal 'freq\\bias'", 1, 1);
  if (header.size() < 3) throw ParseError("header needs at least 2 bias values", 1, 0);
  std::vector<double> bias;
  for (std::size_t c = 1; c < header.size(); ++c) {
    bias.push_back(parse_double(header[c], 1, static_cast<int>(c + 1)));
    if (c > 1 && !(bias.back() > bias[bias.size() - 2]))
      throw ParseError("bias values must be strictly increasing", 1, static_cast<int>(c + 1));
  }

  const std::size_t nrows = lines.size() - 1;
  if (nrows < 2) throw ParseError("need at least 2 frequency rows", static_cast<int>(lines.size()), 0);
  std::vector<double> freq(nrows);
  Matrix amp(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(bias.size()));
  for (std::size_t r = 0; r < nrows; ++r) {
    const int row = static_cast<int>(r + 2);
    const auto cells = split_commas(lines[r + 1]);
    if (cells.size() != header.size()) {
      throw ParseError("ragged row: expected " + std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()),
                       row, static_cast<int>(cells.size()));
    }
    freq[r] = parse_double(cells[0], row, 1);
    if (r > 0) {
      const bool up = freq[1] > freq[0];
      if ((up && !(freq[r] > freq[r - 1])) || (!up && !(freq[r] < freq[r - 1])) ||
          freq[r] == freq[r - 1])
        throw ParseError("frequency values must be strictly monotonic", row, 1);
    }
    for (std::size_t c = 1; c < cells.size(); ++c) {
      amp(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) =
          parse_double(cells[c], row, static_cast<int>(c + 1));
    }
  }
  return Spectrum2D(AxisGrid(std::move(bias), "bias", ""), AxisGrid(std::move(freq), "freq", ""),
                    std::move(amp));
}

std::string format_csv_spectrum(const Spectrum2D &s) {
  if (!s.bias().increasing())
    throw InvalidArgument("CSV format requires an increasing bias axis", "bias");
  std::string out = "freq\\bias";
  for (double b : s.bias().values()) {
    out += ',';
    out += format_double(b);
  }
  out += '\n';
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    out += format_double(s.freq()[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      out += ',';
      out += format_double(s.amplitude()(r, c));
    }
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json axis_to_json(const AxisGrid &a) {
  return {{"values", a.values()}, {"label", a.label()}, {"unit", a.unit()}};
}

AxisGrid axis_from_json(const nlohmann::json &j, const std::string &name) {
  if (!j.contains(name)) throw ParseError("missing '" + name + "' object");
  const auto &a = j.at(name);
  if (a.is_array()) return AxisGrid(a.get<std::vector<double>>(), name, "");
  if (!a.is_object() || !a.contains("values")) throw ParseError("'" + name + "' needs 'values'");
  try {
    return AxisGrid(a.at("values").get<std::vector<double>>(), a.value("label", name),
                    a.value("unit", ""));
  } catch (const InvalidArgument &e) {
    throw ParseError(e.what());
  }
}

}  // namespace

Spectrum2D parse_json_spectrum(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  AxisGrid bias = axis_from_json(j, "bias");
  AxisGrid freq = axis_from_json(j, "freq");
  if (!j.contains("amplitude") || !j["amplitude"].is_array())
    throw ParseError("missing 'amplitude' array");
  const auto &rows = j["amplitude"];
  if (rows.size() != freq.size())
    throw ParseError("amplitude has " + std::to_string(rows.size()) + " rows, expected " +
                     std::to_string(freq.size()));
  Matrix amp(static_cast<Eigen::Index>(freq.size()), static_cast<Eigen::Index>(bias.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != bias.size())
      throw ParseError("ragged amplitude row", static_cast<int>(r + 1), 0);
    for (std::size_t c = 0; c < bias.size(); ++c) {
      const auto &cell = rows[r][c];
      if (!cell.is_number())
        throw ParseError("non-numeric amplitude", static_cast<int>(r + 1),
                         static_cast<int>(c + 1));
      const double v = cell.get<double>();
      if (!std::isfinite(v))
        throw ParseError("non-finite amplitude", static_cast<int>(r + 1),
                         static_cast<int>(c + 1));
      amp(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  std::map<std::string, std::string> meta;
  if (j.contains("metadata") && j["metadata"].is_object()) {
    for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it) {
      meta[it.key()] = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    }
  }
  return Spectrum2D(std::move(bias), std::move(freq), std::move(amp), std::move(meta));
}

Spectrum2D load_spectrum(const std::filesystem::path &path, SpectrumFormat format, bool negate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Spectrum2D s;
  if (format == SpectrumFormat::CsvMatrix) {
    try {
      s = parse_csv_spectrum(buf.str());
    } catch (const InvalidArgument &e) {
      throw ParseError(e.what());
    }
  } else {
    s = parse_json_spectrum(buf.str());
  }
  if (negate) {
    s = Spectrum2D(s.bias(), s.freq(), -s.amplitude(), s.metadata());
    s.metadata()["negated_on_load"] = "true";
  }
  return s;
}

std::string format_json_spectrum(const Spectrum2D &s) {
  nlohmann::json j;
  j["bias"] = axis_to_json(s.bias());
  j["freq"] = axis_to_json(s.freq());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(s.cols()));
    for (Eigen::Index c = 0; c < s.cols(); ++c) row[static_cast<std::size_t>(c)] = s.amplitude()(r, c);
    rows.push_back(std::move(row));
  }
  j["amplitude"] = std::move(rows);
  j["metadata"] = s.metadata();
  return j.dump() + '\n';
}

void save_spectrum(const Spectrum2D &s, const std::filesystem::path &path, SpectrumFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  if (format == SpectrumFormat::CsvMatrix) {
    out << format_csv_spectrum(s);
    return;
  }
  out << format_json_spectrum(s);
}

Matrix normalize_unit_range(const Matrix &image) {
  if (image.size() == 0) throw InvalidArgument("cannot normalize an empty matrix");
  if (!image.allFinite()) throw InvalidArgument("cannot normalize a non-finite matrix");
  const double lo = image.minCoeff();
  const double hi = image.maxCoeff();
  if (!(hi > lo)) throw InvalidArgument("degenerate range: matrix is constant");
  return (image.array() - lo) / (hi - lo);
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed;
  std::uint64_t mixed = splitmix64(x);
  x = mixed ^ (stream * 0xd1b54a32d192ed03ULL);
  engine_.seed(splitmix64(x));
}

double GaussianStream::next_unit() {
  // 53 random bits in (0, 1].
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Spectrum2D generate_synthetic_spectrum(const std::vector<SyntheticLineSpec> &lines,
                                       const AxisGrid &bias, const AxisGrid &freq,
                                       const SyntheticOptions &options) {
  if (options.sigma_g < 0.0) throw InvalidArgument("sigma_g must be >= 0", "sigma_g");
  for (const auto &line : lines) {
    if (!(line.gamma > 0.0)) throw InvalidArgument("line gamma must be > 0", "gamma");
    if (!line.center) throw InvalidArgument("line has no center function", "center");
  }
  const auto rows = static_cast<Eigen::Index>(freq.size());
  const auto cols = static_cast<Eigen::Index>(bias.size());
  Matrix amp(rows, cols);
  std::vector<double> centers(lines.size());
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (std::size_t k = 0; k < lines.size(); ++k) centers[k] = lines[k].center(bias[static_cast<std::size_t>(c)]);
    GaussianStream noise(options.seed, static_cast<std::uint64_t>(c));
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double f = freq[static_cast<std::size_t>(r)];
      double v = options.baseline;
      for (std::size_t k = 0; k < lines.size(); ++k) {
        const double g2 = lines[k].gamma * lines[k].gamma;
        const double d = f - centers[k];
        v -= lines[k].depth * g2 / (4.0 * d * d + g2);
      }
      if (options.sigma_g > 0.0) v += options.sigma_g * noise.next();
      amp(r, c) = v;
    }
  }
  std::map<std::string, std::string> meta{
      {"generator", "synthetic-lorentzian"},
      {"noise_algorithm", kNoiseAlgorithm},
      {"seed", std::to_string(options.seed)},
      {"sigma_g", format_double(options.sigma_g)},
      {"baseline", format_double(options.baseline)},
      {"lines", std::to_string(lines.size())},
  };
  return Spectrum2D(bias, freq, std::move(amp), std::move(meta));
}

}  // namespace scspec
