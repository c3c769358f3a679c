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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scspec/contour.hpp"
#include "scspec/spectrum.hpp"
#include "scspec/valley_filter.hpp"

namespace scspec {

/// Human-made grouping of contour ids into transition branches.
struct GroupAssignment {
  std::map<int, std::vector<int>> groups;
  std::map<int, std::string> transition_labels;
  std::vector<int> ignored;

  /// Throws InvalidArgument when a contour id is listed twice.
  void validate() const;
};

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct RegionMask {
  int group_id = 0;
  BoolMatrix cells;
};

struct PeakPoint {
  int bias_index = 0;
  double bias = 0.0;
  double freq = 0.0;
  double amplitude = 0.0;
};

enum class PeakMethod { RegionMin, LorentzianFit };

struct PeakSet {
  PeakMethod method = PeakMethod::RegionMin;
  std::map<int, std::vector<PeakPoint>> groups;
  /// (group, bias_index) of columns whose minimum was tied; lower frequency kept.
  std::vector<std::pair<int, int>> tied_columns;
  /// (group, bias_index) of columns skipped by the Lorentzian method.
  std::vector<std::pair<int, int>> skipped_columns;

  std::size_t size() const;
};

struct DilationHalfwidths {
  int rows = 5;
  int cols = 1;
};

/// Union of rectangles around each rasterized vertex of each member contour.
std::vector<RegionMask> build_regions(const ContourSet &set, const GroupAssignment &assignment,
                                      DilationHalfwidths halfwidths = {});

/// output_k = input_k minus the union of all other inputs.
std::vector<RegionMask> xor_resolve(const std::vector<RegionMask> &masks);

struct LorentzianParams {
  double center = 0.0;
  double fwhm = 0.0;
  double depth = 0.0;
  double offset = 0.0;
};

struct LorentzianFit {
  LorentzianParams params;
  double residual_norm = 0.0;
  int iterations = 0;
};

struct LorentzianFitOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;  // relative step / cost change
};

/// Least squares fit of offset - depth * fwhm^2 / (4 (f - center)^2 + fwhm^2).
/// Initial center defaults to the frequency of the minimum, fwhm to 3 grid steps.
LorentzianFit lorentzian_fit_1d(const std::vector<double> &freq,
                                const std::vector<double> &amplitude,
                                std::optional<LorentzianParams> init = std::nullopt,
                                const LorentzianFitOptions &options = {});

/// Per bias column and group, the frequency of the minimum filtered value
/// inside the mask (RegionMin), or the fitted Lorentzian center on the raw
/// column restricted to the mask rows (LorentzianFit).
PeakSet extract_peaks(const FilteredImage &filtered, const std::vector<RegionMask> &masks,
                      const AxisGrid &bias, const AxisGrid &freq,
                      PeakMethod method = PeakMethod::RegionMin, const Spectrum2D *raw = nullptr);

struct PrecisionRow {
  double sigma_g = 0.0;
  double sigma_p = 0.0;
  double mean_peak = 0.0;
};

struct PrecisionStudy {
  std::vector<PrecisionRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Extracted peak offsets of the first swept sigma_g > 0 (histogram source).
  std::vector<double> sample_peaks;
};

struct PrecisionOptions {
  double half_range = 50.0;  // y in [-half_range, half_range]
  double step = 1.0;         // y sampling step
  double filter_scale = 0.0; // pixels; 0: derived from gamma via scale_from_fwhm
  double edge_margin = 2.0;  // rows within edge_margin * scale of the edges are not searched
};

/// Peak-position spread versus noise: for each sigma_g, n draws of
/// L(y) = gamma^2 / (4 y^2 + gamma^2) plus Gaussian noise laid out as the
/// columns of one image, filtered and reduced to one region-min peak per column.
PrecisionStudy precision_study(double gamma, const std::vector<double> &sigma_g_list, int n,
                               std::uint64_t seed, const PrecisionOptions &options = {});

}  // namespace scspec
