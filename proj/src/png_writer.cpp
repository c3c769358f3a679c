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

#include "scspec/png_writer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include <png.h>

#include "scspec/error.hpp"

namespace scspec {

namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto *out = static_cast<std::string *>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char *>(data), length);
}

void flush_nothing(png_structp) {}

std::string encode(int width, int height, int color_type, int channels, const std::uint8_t *pixels) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("io", "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("io", "png_create_info_struct failed");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("io", "PNG encoding failed");
  }
  png_set_write_fn(png, &out, append_bytes, flush_nothing);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(pixels + static_cast<std::size_t>(y) * width * channels));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::uint8_t to_byte(double v) {
  if (!std::isfinite(v)) v = 0.0;
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

// 3x5 glyphs, rows top to bottom, 3 bits each (MSB = left).
const std::map<char, std::array<std::uint8_t, 5>> &glyphs() {
  static const std::map<char, std::array<std::uint8_t, 5>> g = {
      {'0', {7, 5, 5, 5, 7}}, {'1', {2, 6, 2, 2, 7}}, {'2', {7, 1, 7, 4, 7}}, {'3', {7, 1, 7, 1, 7}},
      {'4', {5, 5, 7, 1, 1}}, {'5', {7, 4, 7, 1, 7}}, {'6', {7, 4, 7, 5, 7}}, {'7', {7, 1, 1, 1, 1}},
      {'8', {7, 5, 7, 5, 7}}, {'9', {7, 5, 7, 1, 7}}, {'.', {0, 0, 0, 0, 2}}, {'-', {0, 0, 7, 0, 0}},
      {'+', {0, 2, 7, 2, 0}}, {'e', {0, 7, 7, 4, 7}}, {'w', {0, 5, 5, 7, 5}}, {'(', {1, 2, 2, 2, 1}},
      {')', {4, 2, 2, 2, 4}}, {',', {0, 0, 0, 2, 4}}, {'g', {7, 5, 7, 1, 7}}, {'x', {0, 5, 2, 5, 0}},
      {' ', {0, 0, 0, 0, 0}}};
  return g;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string encode_png_gray(const Matrix &values, bool flip_rows) {
  if (values.size() == 0) throw InvalidArgument("cannot encode an empty image");
  const int h = static_cast<int>(values.rows()), w = static_cast<int>(values.cols());
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const Eigen::Index r = flip_rows ? h - 1 - y : y;
    for (int x = 0; x < w; ++x) px[static_cast<std::size_t>(y) * w + x] = to_byte(values(r, x));
  }
  return encode(w, h, PNG_COLOR_TYPE_GRAY, 1, px.data());
}

bool top_is_last_row(const AxisGrid &freq) { return freq.increasing(); }

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidArgument("image size must be positive");
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) std::copy(fill.begin(), fill.end(), data_.begin() + static_cast<long>(i));
}

RgbImage RgbImage::from_gray(const Matrix &values, bool flip_rows) {
  RgbImage img(static_cast<int>(values.cols()), static_cast<int>(values.rows()));
  for (int y = 0; y < img.height_; ++y) {
    const Eigen::Index r = flip_rows ? img.height_ - 1 - y : y;
    for (int x = 0; x < img.width_; ++x) {
      const std::uint8_t v = to_byte(values(r, x));
      img.set(x, y, {v, v, v});
    }
  }
  return img;
}

void RgbImage::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  std::copy(c.begin(), c.end(), data_.begin() + (static_cast<long>(y) * width_ + x) * 3);
}

Rgb RgbImage::get(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void RgbImage::line(double x0, double y0, double x1, double y1, Rgb c) {
  const int steps = static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))) + 1;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    set(static_cast<int>(std::lround(x0 + t * (x1 - x0))), static_cast<int>(std::lround(y0 + t * (y1 - y0))), c);
  }
}

void RgbImage::rect(int x0, int y0, int x1, int y1, Rgb c) {
  line(x0, y0, x1, y0, c);
  line(x1, y0, x1, y1, c);
  line(x1, y1, x0, y1, c);
  line(x0, y1, x0, y0, c);
}

void RgbImage::text(int x, int y, const std::string &s, Rgb c, int scale) {
  int cursor = x;
  for (char ch : s) {
    const auto it = glyphs().find(ch);
    if (it != glyphs().end()) {
      for (int gy = 0; gy < 5; ++gy)
        for (int gx = 0; gx < 3; ++gx)
          if (it->second[static_cast<std::size_t>(gy)] & (4 >> gx))
            for (int sy = 0; sy < scale; ++sy)
              for (int sx = 0; sx < scale; ++sx) set(cursor + gx * scale + sx, y + gy * scale + sy, c);
    }
    cursor += 4 * scale;
  }
}

std::string RgbImage::encode() const { return scspec::encode(width_, height_, PNG_COLOR_TYPE_RGB, 3, data_.data()); }

Rgb palette(std::size_t i) {
  static const Rgb colors[] = {{228, 26, 28},  {55, 126, 184}, {77, 175, 74}, {152, 78, 163},
                               {255, 127, 0},  {166, 86, 40},  {247, 129, 191}, {0, 0, 0}};
  return colors[i % (sizeof colors / sizeof colors[0])];
}

RgbImage line_plot(const std::vector<PlotSeries> &series, int width, int height, bool log_y) {
  RgbImage img(width, height);
  const int left = 50, right = width - 10, top = 10, bottom = height - 25;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  for (const auto &s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  img.rect(left, top, right, bottom, {0, 0, 0});
  if (!(xmax >= xmin) || !(ymax >= ymin)) return img;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double y) { return bottom - (ty(y) - ymin) / (ymax - ymin) * (bottom - top); };
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto &s = series[k];
    bool have_prev = false;
    double prev_x = 0.0, prev_y = 0.0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) {
        have_prev = false;
        continue;
      }
      const double x = px(s.x[i]), y = py(s.y[i]);
      if (have_prev) img.line(prev_x, prev_y, x, y, palette(k));
      img.rect(static_cast<int>(x) - 1, static_cast<int>(y) - 1, static_cast<int>(x) + 1, static_cast<int>(y) + 1, palette(k));
      prev_x = x;
      prev_y = y;
      have_prev = true;
    }
  }
  const std::string y_lo = log_y ? "1e" + short_number(ymin) : short_number(ymin);
  const std::string y_hi = log_y ? "1e" + short_number(ymax) : short_number(ymax);
  img.text(2, bottom - 5, y_lo, {0, 0, 0});
  img.text(2, top, y_hi, {0, 0, 0});
  img.text(left, bottom + 8, short_number(xmin), {0, 0, 0});
  const std::string x_hi = short_number(xmax);
  img.text(right - 4 * static_cast<int>(x_hi.size()), bottom + 8, x_hi, {0, 0, 0});
  return img;
}

void write_binary_file(const std::filesystem::path &path, const std::string &bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace scspec
