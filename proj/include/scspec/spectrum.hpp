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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scspec {

using Matrix = Eigen::MatrixXd;

/// Strictly monotonic sample positions along one spectrum axis.
class AxisGrid {
 public:
  AxisGrid() = default;
  AxisGrid(std::vector<double> values, std::string label, std::string unit);

  /// `count` evenly spaced points from `first` to `last` inclusive.
  static AxisGrid linspace(double first, double last, std::size_t count, std::string label,
                           std::string unit);

  const std::vector<double> &values() const { return values_; }
  const std::string &label() const { return label_; }
  const std::string &unit() const { return unit_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool increasing() const { return values_.back() > values_.front(); }

  /// Index of the sample closest to `x`.
  std::size_t nearest_index(double x) const;
  /// Mean spacing |last - first| / (n - 1).
  double mean_step() const;

 private:
  std::vector<double> values_;
  std::string label_;
  std::string unit_;
};

/// Amplitude map with rows indexed by frequency and columns by bias.
class Spectrum2D {
 public:
  Spectrum2D() = default;
  Spectrum2D(AxisGrid bias, AxisGrid freq, Matrix amplitude,
             std::map<std::string, std::string> metadata = {});

  const AxisGrid &bias() const { return bias_; }
  const AxisGrid &freq() const { return freq_; }
  const Matrix &amplitude() const { return amplitude_; }
  const std::map<std::string, std::string> &metadata() const { return metadata_; }
  std::map<std::string, std::string> &metadata() { return metadata_; }

  Eigen::Index rows() const { return amplitude_.rows(); }
  Eigen::Index cols() const { return amplitude_.cols(); }

 private:
  AxisGrid bias_;
  AxisGrid freq_;
  Matrix amplitude_;
  std::map<std::string, std::string> metadata_;
};

enum class SpectrumFormat { CsvMatrix, Json };

SpectrumFormat format_from_path(const std::filesystem::path &path);

/// Load a spectrum. `negate` flips ridge-style data into the valley convention.
Spectrum2D load_spectrum(const std::filesystem::path &path, SpectrumFormat format,
                         bool negate = false);
void save_spectrum(const Spectrum2D &spectrum, const std::filesystem::path &path,
                   SpectrumFormat format);

Spectrum2D parse_csv_spectrum(const std::string &text);
std::string format_csv_spectrum(const Spectrum2D &spectrum);
Spectrum2D parse_json_spectrum(const std::string &text);
std::string format_json_spectrum(const Spectrum2D &spectrum);

/// (x - min) / (max - min). Throws InvalidArgument on constant or empty input.
Matrix normalize_unit_range(const Matrix &image);

struct SyntheticLineSpec {
  std::function<double(double)> center;  // bias -> frequency
  double gamma = 0.0;                    // Lorentzian FWHM, frequency units
  double depth = 1.0;
};

struct SyntheticOptions {
  double baseline = 1.0;
  double sigma_g = 0.0;
  std::uint64_t seed = 0;
};

/// baseline - sum_k depth_k * L_k(f) + N(0, sigma_g^2) per cell, with
/// L(f) = gamma^2 / (4 (f - center(bias))^2 + gamma^2).
Spectrum2D generate_synthetic_spectrum(const std::vector<SyntheticLineSpec> &lines,
                                       const AxisGrid &bias, const AxisGrid &freq,
                                       const SyntheticOptions &options);

/// Identifier of the noise stream recorded in synthetic metadata.
inline constexpr const char *kNoiseAlgorithm = "mt19937_64/splitmix64-column/box-muller";

/// Portable Gaussian stream: mt19937_64 seeded from splitmix64(seed, stream),
/// Box-Muller transform. Bit-reproducible across standard libraries.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream);
  double next();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
  double next_unit();
};

}  // namespace scspec
