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

#include <vector>

#include <Eigen/Dense>

#include "scspec/spectrum.hpp"

namespace scspec {

enum class LineMode { Valley, Ridge };

struct FilterConfig {
  std::vector<double> scales{1.0, 2.0, 4.0};  // Gaussian std, pixels
  LineMode mode = LineMode::Valley;
};

/// Scale-normalized (sigma^2) Hessian of the Gaussian-smoothed image.
/// Rows are the "r" axis, columns the "c" axis.
struct HessianField {
  Matrix rr;
  Matrix rc;
  Matrix cc;
};

HessianField hessian_at_scale(const Matrix &image, double sigma);

struct FilteredImage {
  Matrix data;           // valleys are minima, range [0, 1]
  Matrix raw_response;   // multi-scale line measure before negation/normalization
  FilterConfig config;
  Eigen::MatrixXi best_scale;  // index into config.scales, -1 where no response
  bool degenerate = false;     // response was constant; data is all 0.5
};

/// Multi-scale line filter. Per scale: eigenvalues l1 <= l2 of the normalized
/// Hessian; the line measure is max(l2, 0) for valleys (max(-l1, 0) for ridges).
/// The scale maximum is negated and min-max normalized.
FilteredImage multiscale_valley_response(const Matrix &image, const FilterConfig &config);

/// Gaussian scale matching a line of the given FWHM (pixels).
double scale_from_fwhm(double fwhm_px);

/// FWHM in frequency units -> filter scale in pixels of `freq`.
double scale_from_fwhm(double fwhm, const AxisGrid &freq);

}  // namespace scspec
