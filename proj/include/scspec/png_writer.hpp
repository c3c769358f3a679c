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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scspec/spectrum.hpp"

namespace scspec {

/// 8-bit grayscale encoding: pixel = round(255 * clamp(v, 0, 1)). With
/// `flip_rows`, matrix row 0 lands at the bottom of the image.
std::string encode_png_gray(const Matrix &values, bool flip_rows);

/// Row order for a spectrum-shaped matrix so that the top image row is the
/// highest frequency.
bool top_is_last_row(const AxisGrid &freq);

using Rgb = std::array<std::uint8_t, 3>;

class RgbImage {
 public:
  RgbImage(int width, int height, Rgb fill = {255, 255, 255});
  static RgbImage from_gray(const Matrix &values, bool flip_rows);

  int width() const { return width_; }
  int height() const { return height_; }
  void set(int x, int y, Rgb c);
  Rgb get(int x, int y) const;
  void line(double x0, double y0, double x1, double y1, Rgb c);
  void rect(int x0, int y0, int x1, int y1, Rgb c);
  /// 3x5 bitmap glyphs for digits and a few symbols, scaled by `scale`.
  void text(int x, int y, const std::string &s, Rgb c, int scale = 1);
  std::string encode() const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// One colour per index, cycling through a fixed palette.
Rgb palette(std::size_t i);

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot with a frame, min/max axis labels and optional log-scale y.
RgbImage line_plot(const std::vector<PlotSeries> &series, int width, int height, bool log_y);

void write_binary_file(const std::filesystem::path &path, const std::string &bytes);

}  // namespace scspec
