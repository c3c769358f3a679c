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

#include <gtest/gtest.h>

#include "scspec/convergence.hpp"
#include "scspec/error.hpp"

namespace scspec {
namespace {

TEST(FluxPoints, Endpoints) {
  const auto f = flux_points(0.49, 0.5, 21);
  ASSERT_EQ(f.size(), 21u);
  EXPECT_DOUBLE_EQ(f.front(), 0.49);
  EXPECT_DOUBLE_EQ(f.back(), 0.5);
  EXPECT_NEAR(f[10], 0.495, 1e-15);
  EXPECT_EQ(flux_points(0.3, 0.7, 1), std::vector<double>{0.3});
  EXPECT_THROW(flux_points(0, 1, 0), InvalidArgument);
}

TEST(FockConvergence, DeviationShrinksAndReachesZero) {
  FockSweep s;
  s.fock_values = {3, 5, 7, 9, 11, 13, 14};
  s.flux = flux_points(0.49, 0.5, 5);
  const FockConvergence c = fock_convergence(s);
  const auto &v = c.deviation.values;
  ASSERT_EQ(v.size(), s.fock_values.size());
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i], v[i - 1] + 1e-12);
  EXPECT_NEAR(v.back(), 0.0, 1e-12);
  EXPECT_GT(v.front(), 1e-3);
  EXPECT_EQ(c.deviation.per_bias.rows(), static_cast<Eigen::Index>(v.size()));
  EXPECT_EQ(c.deviation.per_bias.cols(), 5);
  ASSERT_TRUE(c.deviation.first_within(1e-3).has_value());
  // ground energy is variational in the Fock cutoff
  for (Eigen::Index b = 0; b < c.deviation.ground_energy.cols(); ++b)
    for (Eigen::Index i = 1; i < c.deviation.ground_energy.rows(); ++i)
      EXPECT_LE(c.deviation.ground_energy(i, b), c.deviation.ground_energy(i - 1, b) + 1e-10);
  ASSERT_EQ(c.ratio.series.size(), 3u);
  for (const auto &[name, r] : c.ratio.series) EXPECT_NEAR(r.back(), 1.0, 1e-12) << name;
}

TEST(ChargeConvergence, SmallSweep) {
  ChargeSweep s;
  s.cutoffs = {{4, 4, 4}, {6, 6, 6}};
  s.reference = {7, 7, 7};
  s.flux = flux_points(0.495, 0.5, 2);
  const ConvergenceReport r = charge_convergence(CircuitParams{}, s);
  ASSERT_EQ(r.values.size(), 2u);
  EXPECT_LT(r.values[1], r.values[0]);
  EXPECT_EQ(r.reference, cutoff_label({7, 7, 7}));
  EXPECT_EQ(r.settings[0], cutoff_label({4, 4, 4}));
}

TEST(QubitSpaceConvergence, RitzGroundEnergyNonIncreasing) {
  QubitSpaceSweep s;
  s.q_values = {3, 5, 8};
  s.q_ref = 8;
  s.fock = 6;
  s.cutoff = {4, 4, 4};
  s.flux = flux_points(0.495, 0.5, 2);
  const ConvergenceReport r = qubit_space_convergence(CircuitParams{}, s);
  ASSERT_EQ(r.values.size(), 3u);
  EXPECT_NEAR(r.values.back(), 0.0, 1e-9);
  for (Eigen::Index b = 0; b < r.ground_energy.cols(); ++b)
    for (Eigen::Index i = 1; i < r.ground_energy.rows(); ++i)
      EXPECT_LE(r.ground_energy(i, b), r.ground_energy(i - 1, b) + 1e-9);
}

TEST(ConvergenceReport, FirstWithin) {
  ConvergenceReport r;
  r.values = {1.0, 0.1, 0.01, 0.02};
  EXPECT_EQ(r.first_within(0.05), 2u);
  EXPECT_FALSE(r.first_within(0.001).has_value());
}

}  // namespace
}  // namespace scspec
