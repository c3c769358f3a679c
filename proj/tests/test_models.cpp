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


#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "scspec/error.hpp"
#include "scspec/hamiltonian.hpp"

namespace scspec {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd &h) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

TEST(Rabi, UncoupledLimit) {
  const double delta = 0.83, omega = 5.17, fock = 12;
  for (double eps : {0.0, 1.7}) {
    std::vector<double> expected;
    const double half = 0.5 * std::hypot(eps, delta);
    for (int n = 0; n < fock; ++n) {
      expected.push_back(-half + n * omega);
      expected.push_back(half + n * omega);
    }
    const Eigen::VectorXd e = eigenvalues(rabi_hamiltonian(0.0, delta, omega, eps, static_cast<int>(fock)));
    EXPECT_LE((e - sorted(expected)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Rabi, ZeroGapDisplacedOscillator) {
  const double omega = 5.17, g = 0.5 * omega, eps = 0.9;
  const int fock = 40;
  const Eigen::VectorXd e = eigenvalues(rabi_hamiltonian(g, 0.0, omega, eps, fock));
  std::vector<double> expected;
  for (int n = 0; n < 12; ++n) {
    expected.push_back(n * omega - g * g / omega + eps / 2);
    expected.push_back(n * omega - g * g / omega - eps / 2);
  }
  EXPECT_LE((e.head(24) - sorted(expected)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Rabi, SymmetricInEpsilon) {
  const Eigen::VectorXd a = eigenvalues(rabi_hamiltonian(3.45, 0.83, 5.17, 2.3, 14));
  const Eigen::VectorXd b = eigenvalues(rabi_hamiltonian(3.45, 0.83, 5.17, -2.3, 14));
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Rabi, MatrixLayoutQubitMajor) {
  const Eigen::MatrixXd h = rabi_hamiltonian(0.3, 0.8, 5.0, 1.2, 3);
  ASSERT_EQ(h.rows(), 6);
  EXPECT_NEAR(h(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(h(3 + 2, 3 + 2), -0.6 + 10.0, 1e-15);
  EXPECT_NEAR(h(0, 3), 0.4, 1e-15);
  EXPECT_NEAR(h(0, 1), 0.3, 1e-15);
  EXPECT_NEAR(h(3, 4), -0.3, 1e-15);
  EXPECT_NEAR(h(1, 2), 0.3 * std::sqrt(2.0), 1e-15);
  EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rabi, BiasDependence) {
  RabiParams p;
  p.eps_slope = 20.0;
  p.I0 = 0.1;
  p.A_minus = 0.3;
  p.A_plus = 0.5;
  EXPECT_NEAR(p.eps(0.15), 1.0, 1e-12);
  EXPECT_NEAR(p.resonator(0.1), p.omega_r, 1e-15);
  EXPECT_NEAR(p.resonator(0.3), p.omega_r * (1 + 0.5 * 0.2), 1e-12);
  EXPECT_NEAR(p.resonator(0.0), p.omega_r * (1 + 0.3 * 0.1), 1e-12);
  const Eigen::VectorXd levels = rabi_levels(p, 0.3, 10, 4);
  const Eigen::VectorXd direct = eigenvalues(rabi_hamiltonian(p.g, p.delta, p.resonator(0.3), p.eps(0.3), 10)).head(4);
  EXPECT_LE((levels - direct).cwiseAbs().maxCoeff(), 1e-12);
  p.delta = -1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(Fluxonium, HarmonicLadderWithoutJunction) {
  const FluxoniumParams p{0.0, 0.84, 0.10};
  const Eigen::VectorXd e = fluxonium_levels(p, 0.3, 30, 10);
  const double w = std::sqrt(8 * p.EC * p.EL);
  for (int n = 1; n < 10; ++n) EXPECT_NEAR(e(n) - e(n - 1), w, 1e-9);
}

TEST(Fluxonium, DisplacementMatchesExponential) {
  const int big = 160, size = 24;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(big, big);
  for (int n = 1; n < big; ++n) x(n - 1, n) = x(n, n - 1) = std::sqrt(static_cast<double>(n));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  for (double s : {0.3, 1.1}) {
    const Eigen::VectorXcd phase = (std::complex<double>(0, s) * es.eigenvalues().cast<std::complex<double>>()).array().exp();
    const Eigen::MatrixXcd u = es.eigenvectors().cast<std::complex<double>>() * phase.asDiagonal() *
                               es.eigenvectors().transpose().cast<std::complex<double>>();
    const Eigen::MatrixXcd d = displacement_matrix(s, size);
    EXPECT_LE((d - u.topLeftCorner(size, size)).cwiseAbs().maxCoeff(), 1e-10) << s;
  }
}

TEST(Fluxonium, BasisOracle) {
  const FluxoniumParams p{3.0, 0.84, 0.10};
  for (double phi : {0.0, 0.5 * kPi, kPi}) {
    const Eigen::VectorXd a = fluxonium_levels(p, phi, 50, 2);
    const Eigen::VectorXd b = fluxonium_levels(p, phi, 200, 2);
    EXPECT_LE(std::abs((a(1) - a(0)) - (b(1) - b(0))), phi == 0.0 ? 1e-6 : 1e-5) << phi;
  }
}

TEST(Fluxonium, SymmetricInExternalPhase) {
  const FluxoniumParams p{3.0, 0.84, 0.10};
  const Eigen::VectorXd a = fluxonium_levels(p, 0.7, 60, 8);
  const Eigen::VectorXd b = fluxonium_levels(p, -0.7, 60, 8);
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::VectorXd c = fluxonium_levels(p, 0.7 + 2 * kPi, 60, 8);
  EXPECT_LE((a - c).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Fluxonium, Validation) {
  EXPECT_THROW((FluxoniumParams{1.0, 0.0, 0.1}.validate()), InvalidArgument);
  EXPECT_THROW(fluxonium_hamiltonian(FluxoniumParams{}, 0.0, 0), InvalidArgument);
}

}  // namespace
}  // namespace scspec
