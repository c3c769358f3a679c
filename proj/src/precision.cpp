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

#include <cmath>

#include "scspec/error.hpp"
#include "scspec/peaks.hpp"

namespace scspec {

PrecisionStudy precision_study(double gamma, const std::vector<double> &sigma_g_list, int n,
                               std::uint64_t seed, const PrecisionOptions &options) {
  if (n < 100) throw InvalidArgument("precision study needs n >= 100 draws", "n");
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive", "gamma");
  if (sigma_g_list.empty()) throw InvalidArgument("no noise levels given", "sigma_g");
  if (!(options.step > 0.0) || !(options.half_range >= options.step))
    throw InvalidArgument("precision grid needs 0 < step <= half_range", "step");
  const auto half = static_cast<int>(std::lround(options.half_range / options.step));
  const int rows = 2 * half + 1;
  std::vector<double> y(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) y[static_cast<std::size_t>(i)] = (i - half) * options.step;
  const AxisGrid freq(y, "y", "px");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i;
  const AxisGrid attempts(x, "attempt", "");

  FilterConfig config;
  config.scales = {options.filter_scale > 0.0 ? options.filter_scale : scale_from_fwhm(gamma / options.step)};
  const std::vector<SyntheticLineSpec> line{{[](double) { return 0.0; }, gamma, 1.0}};
  RegionMask search{0, BoolMatrix::Constant(rows, n, true)};
  const auto margin = std::min<Eigen::Index>(
      static_cast<Eigen::Index>(std::ceil(options.edge_margin * config.scales.front())), (rows - 1) / 2);
  search.cells.topRows(margin).setConstant(false);
  search.cells.bottomRows(margin).setConstant(false);

  PrecisionStudy study;
  for (std::size_t k = 0; k < sigma_g_list.size(); ++k) {
    const double sigma_g = sigma_g_list[k];
    SyntheticOptions opts;
    opts.sigma_g = sigma_g;
    opts.seed = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    const Spectrum2D image = generate_synthetic_spectrum(line, attempts, freq, opts);
    const FilteredImage filtered = multiscale_valley_response(image.amplitude(), config);
    const PeakSet peaks = extract_peaks(filtered, {search}, attempts, freq);
    const auto &pts = peaks.groups.at(0);
    double mean = 0.0;
    for (const auto &p : pts) mean += p.freq;
    mean /= static_cast<double>(pts.size());
    double var = 0.0;
    for (const auto &p : pts) var += (p.freq - mean) * (p.freq - mean);
    var /= static_cast<double>(pts.size());
    study.rows.push_back({sigma_g, std::sqrt(var), mean});
    if (study.sample_peaks.empty() && sigma_g > 0.0) {
      for (const auto &p : pts) study.sample_peaks.push_back(p.freq);
    }
  }

  // Ordinary least squares sigma_p = slope * sigma_g + intercept.
  const double m = static_cast<double>(study.rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto &r : study.rows) {
    sx += r.sigma_g;
    sy += r.sigma_p;
    sxx += r.sigma_g * r.sigma_g;
    sxy += r.sigma_g * r.sigma_p;
  }
  const double denom = m * sxx - sx * sx;
  if (denom > 0.0) {
    study.slope = (m * sxy - sx * sy) / denom;
    study.intercept = (sy - study.slope * sx) / m;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / m;
    for (const auto &r : study.rows) {
      const double fit = study.slope * r.sigma_g + study.intercept;
      ss_res += (r.sigma_p - fit) * (r.sigma_p - fit);
      ss_tot += (r.sigma_p - ybar) * (r.sigma_p - ybar);
    }
    study.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  return study;
}

}  // namespace scspec
