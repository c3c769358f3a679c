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

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "scspec/eigensolver.hpp"

namespace scspec {

/// Four-junction flux qubit galvanically coupled to an LC resonator through
/// the beta junction. Energies are E/h in GHz; junction areas relative to a.
struct CircuitParams {
  double EJ = 278.0;
  double Ec = 2.88;
  double alpha = 0.66;
  double beta = 1.62;
  double b = 1.0;
  double Lr_nH = 5.00;
  double Cr_fF = 175.0;

  void validate() const;
};

/// Per-junction Cooper-pair cutoffs for the (beta, alpha, a) axes.
struct ChargeCutoff {
  int k = 9;  // beta
  int l = 6;  // alpha
  int m = 7;  // a

  long dimension() const { return static_cast<long>(2 * k + 1) * (2 * l + 1) * (2 * m + 1); }
  bool operator==(const ChargeCutoff &) const = default;
};

struct TruncationConfig {
  int fock = 13;
  ChargeCutoff charge{};
  int qubit_space = 25;
  int fluxonium_basis = 50;

  void validate() const;
};

/// Coupling prefactor convention for hbar g_ij = prefactor * <i|phi_beta|j>.
enum class CouplingConvention {
  FluxOverTwoPi,  // I_r Phi0 / 2pi (default)
  FluxQuantum,    // I_r Phi0
};

struct CircuitOptions {
  long max_dimension = 8000;
  CouplingConvention coupling = CouplingConvention::FluxOverTwoPi;
  EigenMethod eigen_method = EigenMethod::Auto;
  LanczosOptions lanczos{};
};

/// Capacitance matrix in units of C_J for (phi_beta, phi_alpha, phi_a).
Eigen::Matrix3d mass_matrix(const CircuitParams &params);

/// (Phi0 / 2pi)^2 / L_r expressed as E/h in GHz.
double resonator_inductive_energy(double Lr_nH);

/// Qubit Hamiltonian in the product charge basis, axis order (beta, alpha, a)
/// row-major: index = (i_beta * N_alpha + i_alpha) * N_a + i_a. The potential
/// cos(phi_ex - phi_a - phi_alpha - phi_beta) is expanded into products of
/// single-axis cos/sin operators. `phi_ex` is the external phase in radians.
Eigen::MatrixXcd qubit_hamiltonian(const CircuitParams &params, double phi_ex,
                                   const ChargeCutoff &cutoff, const CircuitOptions &options = {});

/// phi_beta on the full product charge basis.
Eigen::MatrixXcd phi_beta_operator(const ChargeCutoff &cutoff);

/// Basis of charge-parity-adapted real states. Entry k describes basis vector
/// k through the charge-basis index `plus` of q and `minus` of -q:
///   kind 0: |0>, kind 1: (|q> + |-q>)/sqrt2, kind 2: i(|q> - |-q>)/sqrt2.
/// The qubit Hamiltonian and phi_beta are real symmetric in this basis.
struct ParityBasis {
  ChargeCutoff cutoff;
  std::vector<long> plus;
  std::vector<long> minus;
  std::vector<int> kind;

  long dimension() const { return static_cast<long>(kind.size()); }
  /// Unitary with columns = parity states in the charge basis.
  Eigen::SparseMatrix<std::complex<double>> to_charge() const;
};

ParityBasis make_parity_basis(const ChargeCutoff &cutoff);

struct QubitOperators {
  SparseMatrix hamiltonian;  // real symmetric, parity basis
  SparseMatrix phi_beta;     // real symmetric, parity basis
  ParityBasis basis;
};

QubitOperators qubit_operators(const CircuitParams &params, double phi_ex,
                               const ChargeCutoff &cutoff, const CircuitOptions &options = {});

struct QubitEigensystem {
  Eigen::VectorXd energies;   // lowest Q, ascending, GHz
  Eigen::MatrixXd vectors;    // columns in the parity basis
  Eigen::MatrixXd phi_beta;   // <i|phi_beta|j>, Q x Q
  std::string basis_descriptor;
};

QubitEigensystem qubit_eigensystem(const QubitOperators &ops, int qubit_space,
                                   EigenMethod method = EigenMethod::Auto,
                                   const LanczosOptions &lanczos = {});

/// Dense complex route: diagonalize a charge-basis Hamiltonian and sandwich
/// the given phi_beta operator. Eigenvector phases are arbitrary.
struct ComplexQubitEigensystem {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
  Eigen::MatrixXcd phi_beta;
};
ComplexQubitEigensystem qubit_eigensystem(const Eigen::MatrixXcd &hamiltonian,
                                          const Eigen::MatrixXcd &phi_beta, int qubit_space);

struct ResonatorConstants {
  double omega_r = 0.0;  // omega_r / 2pi, GHz
  double I_r = 0.0;      // zero-point current, A
};

ResonatorConstants resonator_constants(double Lr_nH, double Cr_fF);

/// g_ij in GHz from <i|phi_beta|j>.
double coupling_prefactor(const ResonatorConstants &res, CouplingConvention convention);

/// sum_i Omega_i |i><i| + omega_r (a^dag a + 1/2) + sum_ij g_ij |i><j| (a^dag + a),
/// qubit index major, Fock index minor. Works for either eigensystem route.
Eigen::MatrixXd total_hamiltonian(const QubitEigensystem &qubit, const ResonatorConstants &res,
                                  int fock, CouplingConvention convention = CouplingConvention::FluxOverTwoPi);
Eigen::MatrixXcd total_hamiltonian(const ComplexQubitEigensystem &qubit,
                                   const ResonatorConstants &res, int fock,
                                   CouplingConvention convention = CouplingConvention::FluxOverTwoPi);

/// Lowest `levels` eigenvalues of the coupled circuit at external flux
/// phi_ex / 2pi = `flux`.
Eigen::VectorXd circuit_spectrum(const CircuitParams &params, double flux,
                                 const TruncationConfig &trunc, int levels,
                                 const CircuitOptions &options = {});

/// Lowest `levels` qubit-only energies at flux phi_ex / 2pi.
Eigen::VectorXd qubit_spectrum(const CircuitParams &params, double flux,
                               const ChargeCutoff &cutoff, int levels,
                               const CircuitOptions &options = {});

/// Transition label such as "w31" (also "ω31") -> (3, 1).
std::pair<int, int> parse_transition(const std::string &label);
std::string transition_label(std::pair<int, int> pair);

/// E_i - E_j for each pair (i > j).
std::vector<double> transition_frequencies(const Eigen::VectorXd &energies,
                                           const std::vector<std::pair<int, int>> &pairs);

// ---- Rabi model --------------------------------------------------------

/// Bias-dependent Rabi model parameters. Frequencies in GHz (x/2pi), bias in mA.
struct RabiParams {
  double g = 3.45;
  double delta = 0.83;
  double omega_r = 5.17;
  double eps_slope = 0.0;  // GHz per mA
  double I0 = 0.0;         // mA
  double A_minus = 0.0;    // per mA, applies for I < I0
  double A_plus = 0.0;     // per mA, applies for I > I0

  void validate() const;
  /// Bias-dependent detuning eps and resonator frequency at current I.
  double eps(double I) const { return eps_slope * (I - I0); }
  double resonator(double I) const;
};

/// (1/2)(eps sz + delta sx) + omega a^dag a + g sz (a^dag + a), qubit major.
Eigen::MatrixXd rabi_hamiltonian(double g, double delta, double omega_r, double eps, int fock);
Eigen::MatrixXd rabi_hamiltonian(const RabiParams &params, double I, int fock);
Eigen::VectorXd rabi_levels(const RabiParams &params, double I, int fock, int levels = -1);

// ---- Fluxonium ---------------------------------------------------------

struct FluxoniumParams {
  double EJ = 3.0;
  double EC = 0.84;
  double EL = 0.10;

  void validate() const;
};

/// 4 EC q^2 + EL phi^2 / 2 - EJ cos(phi - phi_ex) in the harmonic-oscillator
/// eigenbasis of the first two terms (n_basis levels).
Eigen::MatrixXd fluxonium_hamiltonian(const FluxoniumParams &params, double phi_ex, int n_basis);
Eigen::VectorXd fluxonium_levels(const FluxoniumParams &params, double phi_ex, int n_basis,
                                 int levels = -1);

/// <m| exp(i x (a + a^dag)) |n> for m, n < size (exact, not truncated).
Eigen::MatrixXcd displacement_matrix(double x, int size);

// ---- Bias calibration --------------------------------------------------

/// Linear current-to-flux map phi_ex / 2pi = 0.5 + slope (I - I0).
struct BiasCalibration {
  double I0 = 0.0;     // mA
  double slope = 0.0;  // flux quanta per mA

  BiasCalibration(double I0_mA, double slope_per_mA);
  double flux(double I) const { return 0.5 + slope * (I - I0); }
  double current(double flux) const { return I0 + (flux - 0.5) / slope; }
  /// Persistent current (nA) from the Rabi detuning slope (GHz per mA):
  /// h eps_slope = 2 Ip Phi0 slope.
  double persistent_current_nA(double eps_slope_GHz_per_mA) const;
};

/// Detuning eps / 2pi (GHz) of a persistent-current qubit at flux phi_ex / 2pi.
double flux_detuning(double Ip_nA, double flux);

}  // namespace scspec
