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
#include "scspec/peaks.hpp"
#include "scspec/spectrum.hpp"
#include "scspec/valley_filter.hpp"

namespace scspec {
namespace {

Contour horizontal_contour(int id, double row, int cols) {
  Contour c;
  c.id = id;
  for (int k = 0; k < cols; ++k) c.vertices.push_back({row, static_cast<double>(k)});
  return c;
}

ContourSet two_lines(Eigen::Index rows = 30, Eigen::Index cols = 10) {
  ContourSet set;
  set.rows = rows;
  set.cols = cols;
  set.level = 0.25;
  set.contours = {horizontal_contour(0, 8.2, static_cast<int>(cols)), horizontal_contour(1, 12.0, static_cast<int>(cols)),
                  horizontal_contour(2, 25.0, static_cast<int>(cols))};
  return set;
}

TEST(Assignment, DuplicateIdRejected) {
  GroupAssignment a;
  a.groups = {{0, {1, 2}}, {1, {2}}};
  EXPECT_THROW(a.validate(), InvalidArgument);
  a.groups = {{0, {1, 1}}};
  EXPECT_THROW(a.validate(), InvalidArgument);
  a.groups = {{0, {1}}, {1, {2}}};
  EXPECT_NO_THROW(a.validate());
}

TEST(Regions, RectangularDilation) {
  GroupAssignment a;
  a.groups = {{0, {0}}};
  const auto masks = build_regions(two_lines(), a, {2, 0});
  ASSERT_EQ(masks.size(), 1u);
  for (Eigen::Index r = 0; r < 30; ++r) {
    const bool inside = r >= 6 && r <= 10;
    for (Eigen::Index c = 0; c < 10; ++c) EXPECT_EQ(masks[0].cells(r, c), inside) << r << "," << c;
  }
}

TEST(Regions, ClippedAtBorders) {
  ContourSet set = two_lines();
  set.contours[0] = horizontal_contour(0, 0.0, 10);
  GroupAssignment a;
  a.groups = {{4, {0}}};
  const auto masks = build_regions(set, a, {3, 1});
  EXPECT_EQ(masks[0].group_id, 4);
  EXPECT_EQ(masks[0].cells.count(), 4 * 10);
}

TEST(Regions, UnknownContourRejected) {
  GroupAssignment a;
  a.groups = {{0, {7}}};
  EXPECT_THROW(build_regions(two_lines(), a), InvalidArgument);
  a.groups = {{0, {0}}};
  EXPECT_THROW(build_regions(two_lines(), a, {-1, 0}), InvalidArgument);
}

TEST(Regions, XorRemovesSharedCells) {
  GroupAssignment a;
  a.groups = {{0, {0}}, {1, {1}}, {2, {2}}};
  const auto masks = build_regions(two_lines(), a, {3, 0});
  const auto resolved = xor_resolve(masks);
  ASSERT_EQ(resolved.size(), 3u);
  // rows 9..11 shared by groups 0 (5..11) and 1 (9..15)
  for (Eigen::Index c = 0; c < 10; ++c) {
    for (Eigen::Index r : {9, 10, 11}) {
      EXPECT_TRUE(masks[0].cells(r, c) && masks[1].cells(r, c));
      EXPECT_FALSE(resolved[0].cells(r, c));
      EXPECT_FALSE(resolved[1].cells(r, c));
    }
    EXPECT_TRUE(resolved[0].cells(5, c));
    EXPECT_TRUE(resolved[1].cells(15, c));
  }
  EXPECT_EQ(resolved[2].cells, masks[2].cells);
  for (Eigen::Index i = 0; i < 30 * 10; ++i) {
    int count = 0;
    for (const auto &m : resolved) count += m.cells.data()[i] ? 1 : 0;
    EXPECT_LE(count, 1);
  }
}

TEST(Regions, XorIsIdempotent) {
  GroupAssignment a;
  a.groups = {{0, {0}}, {1, {1}}};
  const auto once = xor_resolve(build_regions(two_lines(), a, {4, 1}));
  const auto twice = xor_resolve(once);
  for (std::size_t k = 0; k < once.size(); ++k) EXPECT_EQ(once[k].cells, twice[k].cells);
}

TEST(Extract, RegionMinimumPerColumn) {
  const AxisGrid bias = AxisGrid::linspace(0.0, 1.0, 10, "b", "mA");
  const AxisGrid freq = AxisGrid::linspace(4.0, 7.0, 30, "f", "GHz");
  FilteredImage f;
  f.data = Matrix::Ones(30, 10);
  for (Eigen::Index c = 0; c < 10; ++c) {
    f.data(8 + (c % 2), c) = 0.1;
    f.data(25, c) = 0.0;
  }
  GroupAssignment a;
  a.groups = {{0, {0}}};
  const auto masks = xor_resolve(build_regions(two_lines(), a, {2, 0}));
  const PeakSet p = extract_peaks(f, masks, bias, freq);
  ASSERT_EQ(p.groups.at(0).size(), 10u);
  for (const auto &pt : p.groups.at(0)) {
    EXPECT_EQ(pt.freq, freq[static_cast<std::size_t>(8 + pt.bias_index % 2)]);
    EXPECT_EQ(pt.bias, bias[static_cast<std::size_t>(pt.bias_index)]);
  }
  EXPECT_TRUE(p.tied_columns.empty());
}

TEST(Extract, TiesPickLowerFrequency) {
  const AxisGrid bias = AxisGrid::linspace(0.0, 1.0, 10, "b", "mA");
  const AxisGrid freq = AxisGrid::linspace(7.0, 4.0, 30, "f", "GHz");  // descending rows
  FilteredImage f;
  f.data = Matrix::Ones(30, 10);
  f.data.row(7).setConstant(0.2);
  f.data.row(9).setConstant(0.2);
  GroupAssignment a;
  a.groups = {{0, {0}}};
  const PeakSet p = extract_peaks(f, build_regions(two_lines(), a, {2, 0}), bias, freq);
  ASSERT_EQ(p.groups.at(0).size(), 10u);
  for (const auto &pt : p.groups.at(0)) EXPECT_EQ(pt.freq, freq[9]);
  EXPECT_EQ(p.tied_columns.size(), 10u);
}

TEST(Extract, EmptyColumnsSkipped) {
  const AxisGrid bias = AxisGrid::linspace(0.0, 1.0, 10, "b", "mA");
  const AxisGrid freq = AxisGrid::linspace(4.0, 7.0, 30, "f", "GHz");
  ContourSet set = two_lines();
  set.contours[0].vertices.resize(4);
  GroupAssignment a;
  a.groups = {{0, {0}}};
  FilteredImage f;
  f.data = Matrix::Ones(30, 10);
  const PeakSet p = extract_peaks(f, build_regions(set, a, {1, 0}), bias, freq);
  EXPECT_EQ(p.groups.at(0).size(), 4u);
  EXPECT_THROW(extract_peaks(f, {}, bias, freq), InvalidArgument);
  EXPECT_THROW(extract_peaks(f, build_regions(set, a), bias, freq, PeakMethod::LorentzianFit), InvalidArgument);
}

TEST(Lorentzian, RecoversExactParameters) {
  std::vector<double> x, y;
  for (int i = 0; i < 81; ++i) {
    const double f = 4.8 + 0.005 * i;
    const double d = f - 5.013;
    x.push_back(f);
    y.push_back(1.2 - 0.7 * 0.03 * 0.03 / (4 * d * d + 0.03 * 0.03));
  }
  const LorentzianFit fit = lorentzian_fit_1d(x, y);
  EXPECT_NEAR(fit.params.center, 5.013, 1e-8);
  EXPECT_NEAR(std::abs(fit.params.fwhm), 0.03, 1e-8);
  EXPECT_NEAR(fit.params.depth, 0.7, 1e-8);
  EXPECT_NEAR(fit.params.offset, 1.2, 1e-8);
  EXPECT_LT(fit.residual_norm, 1e-9);
}

TEST(Lorentzian, TooFewPointsRejected) {
  EXPECT_THROW(lorentzian_fit_1d({1.0, 2.0, 3.0}, {1.0, 0.0, 1.0}), Error);
}

TEST(Extract, LorentzianMethodOnRawSpectrum) {
  const AxisGrid bias = AxisGrid::linspace(0.0, 1.0, 6, "b", "mA");
  const AxisGrid freq = AxisGrid::linspace(4.0, 6.0, 201, "f", "GHz");
  SyntheticLineSpec line{[](double x) { return 5.0 + 0.2 * x + 0.0013; }, 0.08, 1.0};
  const Spectrum2D raw = generate_synthetic_spectrum({line}, bias, freq, {});
  const FilteredImage f = multiscale_valley_response(raw.amplitude(), {});
  const ContourSet set = filter_contours(marching_squares(f.data, 0.25), 2);
  ASSERT_FALSE(set.contours.empty());
  GroupAssignment a;
  for (const auto &c : set.contours) a.groups[0].push_back(c.id);
  const auto masks = build_regions(set, a, {8, 0});
  const PeakSet p = extract_peaks(f, masks, bias, freq, PeakMethod::LorentzianFit, &raw);
  ASSERT_EQ(p.groups.at(0).size(), 6u);
  for (const auto &pt : p.groups.at(0)) EXPECT_NEAR(pt.freq, line.center(pt.bias), 1e-6);
  const PeakSet q = extract_peaks(f, masks, bias, freq, PeakMethod::RegionMin, &raw);
  for (const auto &pt : q.groups.at(0)) EXPECT_NEAR(pt.freq, line.center(pt.bias), 0.5 * freq.mean_step() + 1e-12);
}

TEST(Precision, NoiselessHasZeroSpreadAndNoiseGrows) {
  const PrecisionStudy s = precision_study(10.0, {0.0, 0.5, 2.0}, 300, 5);
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_EQ(s.rows[0].sigma_p, 0.0);
  EXPECT_GT(s.rows[1].sigma_p, 0.0);
  EXPECT_GT(s.rows[2].sigma_p, s.rows[1].sigma_p);
  EXPECT_EQ(s.sample_peaks.size(), 300u);
  const PrecisionStudy again = precision_study(10.0, {0.0, 0.5, 2.0}, 300, 5);
  EXPECT_EQ(again.rows[2].sigma_p, s.rows[2].sigma_p);
}

TEST(Precision, EdgeRowsAreNotSearchedAndGridIsValidated) {
  PrecisionOptions o;
  o.step = 0.5;
  const PrecisionStudy s = precision_study(10.0, {3.0}, 200, 3, o);
  const double limit = o.half_range - std::ceil(o.edge_margin * scale_from_fwhm(10.0 / o.step)) * o.step;
  for (double p : s.sample_peaks) EXPECT_LE(std::abs(p), limit + 1e-12);
  o.step = 0.0;
  EXPECT_THROW(precision_study(10.0, {1.0}, 200, 3, o), InvalidArgument);
}

}  // namespace
}  // namespace scspec
