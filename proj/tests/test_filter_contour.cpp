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
#include <random>

#include <gtest/gtest.h>

#include "scspec/contour.hpp"
#include "scspec/error.hpp"
#include "scspec/spectrum.hpp"
#include "scspec/valley_filter.hpp"

namespace scspec {
namespace {

Matrix valley_image(Eigen::Index rows, Eigen::Index cols, double center_row, double width) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double d = static_cast<double>(r) - center_row;
      m(r, c) = 1.0 - width * width / (4 * d * d + width * width);
    }
  return m;
}

Matrix circle_field(int n, double r0, double c0) {
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = std::hypot(r - r0, c - c0);
  return m;
}

TEST(ValleyFilter, ConstantImageIsDegenerate) {
  const FilteredImage f = multiscale_valley_response(Matrix::Constant(20, 30, 2.0), {});
  EXPECT_TRUE(f.degenerate);
  EXPECT_TRUE((f.data.array() == 0.5).all());
  EXPECT_LT(f.raw_response.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ValleyFilter, MinimumOnTheLine) {
  const Matrix img = valley_image(61, 40, 30.0, 4.0);
  const FilteredImage f = multiscale_valley_response(img, {});
  EXPECT_FALSE(f.degenerate);
  EXPECT_DOUBLE_EQ(f.data.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(f.data.maxCoeff(), 1.0);
  for (Eigen::Index c = 0; c < img.cols(); ++c) {
    Eigen::Index r = 0;
    f.data.col(c).minCoeff(&r);
    EXPECT_EQ(r, 30);
  }
}

TEST(ValleyFilter, RidgeModeOnNegatedImageMatchesValley) {
  const Matrix img = valley_image(41, 25, 17.3, 3.0);
  FilterConfig ridge;
  ridge.mode = LineMode::Ridge;
  const FilteredImage a = multiscale_valley_response(img, {});
  const FilteredImage b = multiscale_valley_response(-img, ridge);
  EXPECT_LE((a.data - b.data).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ValleyFilter, BestScaleTracksWidth) {
  FilterConfig cfg;
  cfg.scales = {1.0, 2.0, 4.0, 8.0};
  const FilteredImage narrow = multiscale_valley_response(valley_image(101, 10, 50.0, 2.0), cfg);
  const FilteredImage wide = multiscale_valley_response(valley_image(101, 10, 50.0, 16.0), cfg);
  EXPECT_LT(narrow.best_scale(50, 5), wide.best_scale(50, 5));
}

TEST(ValleyFilter, RejectsBadScales) {
  FilterConfig cfg;
  cfg.scales = {};
  EXPECT_THROW(multiscale_valley_response(Matrix::Ones(5, 5), cfg), InvalidArgument);
  cfg.scales = {-1.0};
  EXPECT_THROW(multiscale_valley_response(Matrix::Ones(5, 5), cfg), InvalidArgument);
}

TEST(ValleyFilter, ScaleFromFwhm) {
  EXPECT_NEAR(scale_from_fwhm(2.355), 1.0, 1e-15);
  const AxisGrid freq = AxisGrid::linspace(0.0, 1.0, 101, "f", "GHz");
  EXPECT_NEAR(scale_from_fwhm(0.04, freq), 4.0 / 2.355, 1e-12);
}

TEST(MarchingSquares, CircleVerticesOnRadius) {
  const Matrix f = circle_field(64, 31.3, 30.7);
  for (double radius : {5.0, 12.5, 20.0}) {
    const ContourSet set = marching_squares(f, radius);
    ASSERT_EQ(set.contours.size(), 1u);
    EXPECT_TRUE(set.contours[0].closed);
    for (const Point &p : set.contours[0].vertices) {
      EXPECT_NEAR(std::hypot(p.row - 31.3, p.col - 30.7), radius, 0.05);
      EXPECT_NEAR(bilinear(f, p), radius, 1e-9);
    }
  }
}

TEST(MarchingSquares, OpenContourAcrossImage) {
  const Matrix img = valley_image(30, 50, 14.5, 6.0);
  const ContourSet set = marching_squares(normalize_unit_range(img), 0.5);
  ASSERT_EQ(set.contours.size(), 2u);
  for (const auto &c : set.contours) {
    EXPECT_FALSE(c.closed);
    EXPECT_EQ(c.vertices.size(), 50u);
  }
}

TEST(MarchingSquares, ConstantOrOutOfRangeGivesNothing) {
  EXPECT_TRUE(marching_squares(Matrix::Constant(10, 10, 0.5), 0.25).contours.empty());
  EXPECT_TRUE(marching_squares(Matrix::Constant(10, 10, 0.5), 0.5).contours.empty());
  EXPECT_TRUE(marching_squares(circle_field(10, 5, 5), 100.0).contours.empty());
}

TEST(MarchingSquares, SaddleResolvedByCellMean) {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, 1.0;
  const ContourSet high = marching_squares(m, 0.4);  // mean 0.5 above level: high corners joined
  ASSERT_EQ(high.contours.size(), 2u);
  for (const auto &c : high.contours) {
    const Point a = c.vertices.front(), b = c.vertices.back();
    const bool cuts_tr = (a.row == 0 || b.row == 0) && (a.col == 1 || b.col == 1);
    const bool cuts_bl = (a.row == 1 || b.row == 1) && (a.col == 0 || b.col == 0);
    EXPECT_TRUE(cuts_tr || cuts_bl);
  }
  const ContourSet low = marching_squares(m, 0.6);  // mean below level: high corners isolated
  ASSERT_EQ(low.contours.size(), 2u);
  for (const auto &c : low.contours) {
    const Point a = c.vertices.front(), b = c.vertices.back();
    const bool cuts_tl = (a.row == 0 || b.row == 0) && (a.col == 0 || b.col == 0);
    const bool cuts_br = (a.row == 1 || b.row == 1) && (a.col == 1 || b.col == 1);
    EXPECT_TRUE(cuts_tl || cuts_br);
  }
}

TEST(MarchingSquares, BilinearAtEveryVertexRandomField) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(40, 37);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  const ContourSet set = marching_squares(m, 0.1);
  ASSERT_FALSE(set.contours.empty());
  for (const auto &c : set.contours)
    for (const Point &p : c.vertices) EXPECT_NEAR(bilinear(m, p), 0.1, 1e-9);
}

TEST(FilterContours, MinLengthAndRenumbering) {
  Matrix f = circle_field(64, 20, 20);
  const Matrix g = circle_field(64, 50, 50);
  f = f.cwiseMin(g * 3.0);  // small circle around (50,50), large around (20,20)
  const ContourSet all = marching_squares(f, 9.0);
  ASSERT_EQ(all.contours.size(), 2u);
  const ContourSet kept = filter_contours(all, 30);
  ASSERT_EQ(kept.contours.size(), 1u);
  EXPECT_EQ(kept.contours[0].id, 0);
  EXPECT_GE(kept.contours[0].vertices.size(), 30u);
  EXPECT_THROW(filter_contours(all, 1), InvalidArgument);
  EXPECT_TRUE(filter_contours(all, 2, std::make_pair(0.0, 1.0)).contours.empty());
}

TEST(SelectScale, PrefersAScaleThatFindsTheLine) {
  Matrix img = valley_image(80, 60, 40.0, 8.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 0.2);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] += n(rng);
  const std::size_t best = select_scale_by_structure(img, {0.6, 3.0}, 0.25, 20);
  EXPECT_EQ(best, 1u);
}

}  // namespace
}  // namespace scspec
