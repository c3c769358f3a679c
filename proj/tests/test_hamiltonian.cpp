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
#include <complex>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "scspec/charge_ops.hpp"
#include "scspec/eigensolver.hpp"
#include "scspec/error.hpp"
#include "scspec/hamiltonian.hpp"
#include "scspec/units.hpp"

namespace scspec {
namespace {

constexpr double kPi = std::numbers::pi;

// <q'| f(phi) |q> = (1/2pi) int e^{-i(q-q') phi} f(phi) dphi
template <class F>
std::complex<double> charge_element(F f, int q_row, int q_col) {
  using boost::math::quadrature::gauss_kronrod;
  const int n = q_col - q_row;
  auto re = [&](double p) { return std::cos(n * p) * f(p); };
  auto im = [&](double p) { return -std::sin(n * p) * f(p); };
  const double a = gauss_kronrod<double, 61>::integrate(re, -kPi, kPi, 15, 1e-15);
  const double b = gauss_kronrod<double, 61>::integrate(im, -kPi, kPi, 15, 1e-15);
  return {a / (2 * kPi), b / (2 * kPi)};
}

TEST(ChargeOperators, MatchQuadrature) {
  for (int nmax : {1, 4, 12}) {
    const ChargeOperators ops = charge_basis_operators(nmax);
    ASSERT_EQ(ops.dimension(), 2 * nmax + 1);
    for (int r = 0; r < ops.dimension(); ++r) {
      EXPECT_EQ(ops.charge(r), r - nmax);
      for (int c = 0; c < ops.dimension(); ++c) {
        const int qr = r - nmax, qc = c - nmax;
        const auto cos_q = charge_element([](double p) { return std::cos(p); }, qr, qc);
        const auto sin_q = charge_element([](double p) { return std::sin(p); }, qr, qc);
        const auto phi_q = charge_element([](double p) { return p; }, qr, qc);
        const auto phi2_q = charge_element([](double p) { return p * p; }, qr, qc);
        EXPECT_NEAR(ops.cos_phi(r, c), cos_q.real(), 1e-12);
        EXPECT_NEAR(std::abs(cos_q.imag()), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(ops.sin_phi(r, c) - sin_q), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(ops.phi(r, c) - phi_q), 0.0, 1e-12);
        EXPECT_NEAR(ops.phi_sq(r, c), phi2_q.real(), 1e-12);
      }
      EXPECT_NEAR(ops.phi_sq(r, r), kPi * kPi / 3.0, 1e-15);
    }
  }
}

TEST(ChargeOperators, CachedMatchesFresh) {
  const auto &a = cached_charge_operators(6);
  const auto b = charge_basis_operators(6);
  EXPECT_EQ(a.phi_sq, b.phi_sq);
  EXPECT_EQ(&a, &cached_charge_operators(6));
  EXPECT_THROW(charge_basis_operators(-1), InvalidArgument);
}

TEST(Circuit, MassMatrix) {
  CircuitParams p;
  p.alpha = 0.7;
  p.beta = 1.5;
  p.b = 0.9;
  Eigen::Matrix3d expected;
  expected << 1.5 + 0.9, 0.9, 0.9, 0.9, 0.7 + 0.9, 0.9, 0.9, 0.9, 1.9;
  EXPECT_LE((mass_matrix(p) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Circuit, ParameterValidation) {
  CircuitParams p;
  p.EJ = -1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = CircuitParams{};
  p.Cr_fF = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  TruncationConfig t;
  t.qubit_space = 0;
  EXPECT_THROW(t.validate(), InvalidArgument);
}

TEST(Circuit, ResonatorConstants) {
  const ResonatorConstants r = resonator_constants(5.0, 175.0);
  const double l = 5e-9, c = 175e-15;
  const double h = 6.62607015e-34, hbar = h / (2 * kPi), phi0 = h / (2 * 1.602176634e-19);
  EXPECT_NEAR(r.omega_r, 1.0 / (2 * kPi * std::sqrt(l * c)) / 1e9, 1e-12);
  EXPECT_NEAR(r.I_r / std::sqrt(hbar / (2 * l * std::sqrt(l * c))), 1.0, 1e-12);
  const double g = coupling_prefactor(r, CouplingConvention::FluxOverTwoPi);
  EXPECT_NEAR(g / (r.I_r * phi0 / (2 * kPi) / h / 1e9), 1.0, 1e-12);
  EXPECT_NEAR(coupling_prefactor(r, CouplingConvention::FluxQuantum), 2 * kPi * g, 1e-9);
  EXPECT_NEAR(resonator_inductive_energy(5.0) / (std::pow(phi0 / (2 * kPi), 2) / l / h / 1e9), 1.0, 1e-12);
}

TEST(Circuit, QubitHamiltonianIsHermitian) {
  const Eigen::MatrixXcd h = qubit_hamiltonian(CircuitParams{}, 2 * kPi * 0.497, {3, 2, 3});
  EXPECT_LE((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXcd phi = phi_beta_operator({3, 2, 3});
  EXPECT_LE((phi - phi.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Circuit, ParityBasisIsUnitaryAndReal) {
  const ChargeCutoff cut{3, 2, 2};
  const ParityBasis basis = make_parity_basis(cut);
  EXPECT_EQ(basis.dimension(), cut.dimension());
  const Eigen::MatrixXcd u(basis.to_charge());
  EXPECT_LE((u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff(), 1e-14);
  const double phi_ex = 2 * kPi * 0.4931;
  const Eigen::MatrixXcd h = u.adjoint() * qubit_hamiltonian(CircuitParams{}, phi_ex, cut) * u;
  EXPECT_LE(h.imag().cwiseAbs().maxCoeff(), 1e-10);
  const QubitOperators ops = qubit_operators(CircuitParams{}, phi_ex, cut);
  EXPECT_LE((h.real() - Eigen::MatrixXd(ops.hamiltonian)).cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::MatrixXcd phi = u.adjoint() * phi_beta_operator(cut) * u;
  EXPECT_LE(phi.imag().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((phi.real() - Eigen::MatrixXd(ops.phi_beta)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Circuit, ComplexAndRealRoutesAgree) {
  const ChargeCutoff cut{4, 4, 4};
  const double phi_ex = 2 * kPi * 0.495;
  const CircuitParams p;
  const ComplexQubitEigensystem cx = qubit_eigensystem(qubit_hamiltonian(p, phi_ex, cut), phi_beta_operator(cut), 8);
  const QubitEigensystem re = qubit_eigensystem(qubit_operators(p, phi_ex, cut), 8, EigenMethod::Dense);
  EXPECT_LE((cx.energies - re.energies).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((cx.phi_beta.cwiseAbs() - re.phi_beta.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_FALSE(re.basis_descriptor.empty());
  const ResonatorConstants res = resonator_constants(p.Lr_nH, p.Cr_fF);
  const Eigen::VectorXd a = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(total_hamiltonian(cx, res, 6)).eigenvalues();
  const Eigen::VectorXd b = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(total_hamiltonian(re, res, 6)).eigenvalues();
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Eigensolver, LanczosMatchesDense) {
  const QubitOperators ops = qubit_operators(CircuitParams{}, 2 * kPi * 0.498, {6, 5, 6});
  const EigenPairs dense = dense_symmetric_eigen(Eigen::MatrixXd(ops.hamiltonian), 12);
  LanczosReport report;
  const EigenPairs lz = lowest_eigenpairs(ops.hamiltonian, 12, EigenMethod::ShiftInvertLanczos, {}, &report);
  EXPECT_FALSE(report.used_dense);
  EXPECT_LE((dense.values - lz.values).cwiseAbs().maxCoeff(), 1e-8);
  for (int k = 0; k < 12; ++k) {
    const Eigen::VectorXd r = ops.hamiltonian * lz.vectors.col(k) - lz.values(k) * lz.vectors.col(k);
    EXPECT_LT(r.norm(), 1e-6);
  }
}

TEST(Eigensolver, RandomSparseMatrix) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  const int dim = 1500;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < dim; ++i) {
    t.emplace_back(i, i, 4.0 * n(rng));
    for (int k = 1; k <= 3; ++k) {
      const int j = (i + 37 * k) % dim;
      const double v = n(rng);
      t.emplace_back(i, j, v);
      t.emplace_back(j, i, v);
    }
  }
  SparseMatrix a(dim, dim);
  a.setFromTriplets(t.begin(), t.end());
  const EigenPairs dense = dense_symmetric_eigen(Eigen::MatrixXd(a), 20, false);
  const EigenPairs lz = lowest_eigenpairs(a, 20, EigenMethod::ShiftInvertLanczos);
  EXPECT_LE((dense.values - lz.values).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Circuit, SpectrumSymmetricAboutHalfFlux) {
  TruncationConfig t;
  t.charge = {5, 4, 5};
  t.fock = 6;
  t.qubit_space = 8;
  for (double d : {0.002, 0.007}) {
    const Eigen::VectorXd a = circuit_spectrum(CircuitParams{}, 0.5 + d, t, 10);
    const Eigen::VectorXd b = circuit_spectrum(CircuitParams{}, 0.5 - d, t, 10);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Circuit, QubitGapMinimalAtHalfFlux) {
  const ChargeCutoff cut{6, 5, 6};
  auto gap = [&](double f) {
    const Eigen::VectorXd e = qubit_spectrum(CircuitParams{}, f, cut, 2);
    return e(1) - e(0);
  };
  EXPECT_LT(gap(0.5), gap(0.498));
  EXPECT_LT(gap(0.498), gap(0.495));
}

TEST(Circuit, ChargeCutoffOracleLargerBasis) {
  CircuitOptions opts;
  opts.max_dimension = 20000;
  for (double flux : {0.49, 0.5}) {
    const Eigen::VectorXd ref = qubit_spectrum(CircuitParams{}, flux, {12, 12, 12}, 2, opts);
    const Eigen::VectorXd e = qubit_spectrum(CircuitParams{}, flux, {9, 9, 9}, 2, opts);
    EXPECT_LT(std::abs((e(1) - e(0)) - (ref(1) - ref(0))), 1e-3) << flux;
  }
}

TEST(Circuit, DimensionCap) {
  CircuitOptions opts;
  opts.max_dimension = 100;
  EXPECT_THROW(qubit_operators(CircuitParams{}, 0.0, {3, 3, 3}, opts), NumericalError);
}

TEST(Circuit, TotalHamiltonianStructure) {
  QubitEigensystem q;
  q.energies = Eigen::Vector2d(0.0, 1.0);
  q.phi_beta = Eigen::Matrix2d::Zero();
  q.phi_beta(0, 1) = q.phi_beta(1, 0) = 0.5;
  const ResonatorConstants res{5.0, 1e-8};
  const Eigen::MatrixXd h = total_hamiltonian(q, res, 4);
  ASSERT_EQ(h.rows(), 8);
  EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0);
  const double g = 0.5 * coupling_prefactor(res, CouplingConvention::FluxOverTwoPi);
  EXPECT_NEAR(h(0, 0), 2.5, 1e-15);
  EXPECT_NEAR(h(4 + 2, 4 + 2), 1.0 + 5.0 * 2.5, 1e-12);
  EXPECT_NEAR(h(0, 4 + 1), g, 1e-15);            // |0,0> <-> |1,1>
  EXPECT_NEAR(h(1, 4 + 2), g * std::sqrt(2.0), 1e-15);
  EXPECT_EQ(h(0, 1), 0.0);
}

TEST(Transitions, ParseAndFormat) {
  EXPECT_EQ(parse_transition("w31"), std::make_pair(3, 1));
  EXPECT_EQ(parse_transition("ω20"), std::make_pair(2, 0));
  EXPECT_EQ(parse_transition("w12_3"), std::make_pair(12, 3));
  EXPECT_EQ(transition_label({3, 1}), "w31");
  EXPECT_THROW(parse_transition("w01"), InvalidArgument);
  EXPECT_THROW(parse_transition("x10"), InvalidArgument);
  Eigen::VectorXd e(4);
  e << -1.0, 0.5, 2.0, 4.0;
  EXPECT_EQ(transition_frequencies(e, {{1, 0}, {3, 1}}), (std::vector<double>{1.5, 3.5}));
}

TEST(Calibration, PersistentCurrentInverse) {
  const BiasCalibration cal(0.1, 0.05);
  EXPECT_DOUBLE_EQ(cal.flux(0.1), 0.5);
  EXPECT_NEAR(cal.current(cal.flux(0.37)), 0.37, 1e-14);
  const double eps_slope = flux_detuning(323.0, 0.5 + cal.slope);  // GHz per mA
  EXPECT_NEAR(cal.persistent_current_nA(eps_slope), 323.0, 1e-9);
  const BiasCalibration doubled(0.1, 0.10);
  EXPECT_NEAR(doubled.persistent_current_nA(eps_slope), 161.5, 1e-9);
  EXPECT_NEAR(flux_detuning(300.0, 0.5), 0.0, 0.0);
  EXPECT_NEAR(flux_detuning(300.0, 0.501),
              2 * 300e-9 * units::kFluxQuantum * 0.001 / units::kPlanck / 1e9, 1e-12);
  EXPECT_THROW(BiasCalibration(0.0, 0.0), InvalidArgument);
}

}  // namespace
}  // namespace scspec
