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

#include <optional>
#include <utility>
#include <vector>

#include "scspec/spectrum.hpp"

namespace scspec {

struct Point {
  double row = 0.0;
  double col = 0.0;
};

struct Contour {
  int id = 0;
  bool closed = false;
  double level = 0.0;
  std::vector<Point> vertices;
};

struct ContourSet {
  double level = 0.0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<Contour> contours;

  const Contour *find(int id) const;
};

/// Iso-level polylines by marching squares with linear edge interpolation.
/// Corners with value >= level count as "high"; saddles are split by comparing
/// the mean of the four corners with the level. Contour ids follow the
/// row-major order of the first cell each contour touches.
ContourSet marching_squares(const Matrix &image, double level);

/// Keep contours with at least `min_length` vertices; ids are re-densified in
/// their original order. `level_band` drops contours whose level lies outside
/// [lo, hi].
ContourSet filter_contours(const ContourSet &set, int min_length,
                           std::optional<std::pair<double, double>> level_band = std::nullopt);

/// Bilinear interpolation of `image` at a sub-pixel position.
double bilinear(const Matrix &image, Point p);

/// Total vertex count over all contours surviving `min_length`, for the given
/// filter scales; returns the index of the scale that extracts the most.
std::size_t select_scale_by_structure(const Matrix &image, const std::vector<double> &scales,
                                      double level, int min_length);

}  // namespace scspec
