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

#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>

#include "scspec/charge_ops.hpp"
#include "scspec/error.hpp"
#include "scspec/hamiltonian.hpp"
#include "scspec/units.hpp"

namespace scspec {

namespace {

using cplx = std::complex<double>;

Eigen::MatrixXcd kron3(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b,
                       const Eigen::MatrixXcd &c) {
  const Eigen::Index nb = b.rows(), nc = c.rows();
  Eigen::MatrixXcd bc(nb * nc, nb * nc);
  for (Eigen::Index i = 0; i < nb; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) bc.block(i * nc, j * nc, nc, nc) = b(i, j) * c;
  const Eigen::Index n = bc.rows();
  Eigen::MatrixXcd out(a.rows() * n, a.rows() * n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.rows(); ++j) out.block(i * n, j * n, n, n) = a(i, j) * bc;
  return out;
}

void check_dimension(const ChargeCutoff &cutoff, const CircuitOptions &options) {
  if (cutoff.k < 1 || cutoff.l < 1 || cutoff.m < 1)
    throw InvalidArgument("charge cutoffs must be >= 1", "charge");
  if (cutoff.dimension() > options.max_dimension)
    throw NumericalError("qubit matrix dimension " + std::to_string(cutoff.dimension()) +
                         " exceeds the configured cap " + std::to_string(options.max_dimension));
}

}  // namespace

void CircuitParams::validate() const {
  if (!(EJ > 0 && Ec > 0 && alpha > 0 && beta > 0 && b > 0 && Lr_nH > 0 && Cr_fF > 0))
    throw InvalidArgument("circuit parameters must all be positive", "circuit");
}

void TruncationConfig::validate() const {
  if (fock < 2) throw InvalidArgument("Fock truncation must be >= 2", "fock");
  if (charge.k < 1 || charge.l < 1 || charge.m < 1)
    throw InvalidArgument("charge cutoffs must be >= 1", "charge");
  if (qubit_space < 2) throw InvalidArgument("qubit space must be >= 2", "qubit_space");
  if (fluxonium_basis < 10) throw InvalidArgument("fluxonium basis must be >= 10", "fluxonium_basis");
}

Eigen::Matrix3d mass_matrix(const CircuitParams &p) {
  Eigen::Matrix3d m;
  m << p.beta + p.b, p.b, p.b,
       p.b, p.alpha + p.b, p.b,
       p.b, p.b, 1.0 + p.b;
  return m;
}

double resonator_inductive_energy(double Lr_nH) {
  const double flux = units::kFluxQuantum / (2.0 * std::numbers::pi);
  return units::joule_to_ghz(flux * flux / (Lr_nH * units::kNano));
}

Eigen::MatrixXcd qubit_hamiltonian(const CircuitParams &params, double phi_ex,
                                   const ChargeCutoff &cutoff, const CircuitOptions &options) {
  params.validate();
  check_dimension(cutoff, options);
  const Eigen::Matrix3d m = mass_matrix(params);
  Eigen::LDLT<Eigen::Matrix3d> ldlt(m);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError("mass matrix is singular");
  const Eigen::Matrix3d minv = m.inverse();

  const ChargeOperators &ob = cached_charge_operators(cutoff.k);
  const ChargeOperators &oa = cached_charge_operators(cutoff.l);
  const ChargeOperators &o1 = cached_charge_operators(cutoff.m);
  const auto ib = Eigen::MatrixXcd::Identity(ob.dimension(), ob.dimension());
  const auto ia = Eigen::MatrixXcd::Identity(oa.dimension(), oa.dimension());
  const auto i1 = Eigen::MatrixXcd::Identity(o1.dimension(), o1.dimension());
  const Eigen::MatrixXcd cb = ob.cos_phi.cast<cplx>(), sb = ob.sin_phi;
  const Eigen::MatrixXcd ca = oa.cos_phi.cast<cplx>(), sa = oa.sin_phi;
  const Eigen::MatrixXcd c1 = o1.cos_phi.cast<cplx>(), s1 = o1.sin_phi;

  // Kinetic term 4 Ec q^T M^-1 q, diagonal in the charge basis.
  const Eigen::MatrixXcd qb = ob.charge.cast<cplx>().asDiagonal();
  const Eigen::MatrixXcd qa = oa.charge.cast<cplx>().asDiagonal();
  const Eigen::MatrixXcd q1 = o1.charge.cast<cplx>().asDiagonal();
  const Eigen::MatrixXcd qb2 = qb * qb, qa2 = qa * qa, q12 = q1 * q1;
  Eigen::MatrixXcd h = 4.0 * params.Ec *
                       (minv(0, 0) * kron3(qb2, ia, i1) + minv(1, 1) * kron3(ib, qa2, i1) +
                        minv(2, 2) * kron3(ib, ia, q12) +
                        2.0 * minv(0, 1) * kron3(qb, qa, i1) + 2.0 * minv(0, 2) * kron3(qb, ia, q1) +
                        2.0 * minv(1, 2) * kron3(ib, qa, q1));

  // cos(theta), sin(theta) with theta = phi_beta + phi_alpha + phi_a.
  const Eigen::MatrixXcd cos_sum = kron3(cb, ca, c1) - kron3(cb, sa, s1) - kron3(sb, ca, s1) -
                                   kron3(sb, sa, c1);
  const Eigen::MatrixXcd sin_sum = kron3(sb, ca, c1) + kron3(cb, sa, c1) + kron3(cb, ca, s1) -
                                   kron3(sb, sa, s1);
  h -= params.EJ * (params.beta * kron3(cb, ia, i1) + kron3(ib, ia, c1) +
                    params.alpha * kron3(ib, ca, i1) +
                    params.b * (std::cos(phi_ex) * cos_sum + std::sin(phi_ex) * sin_sum));
  h += 0.5 * resonator_inductive_energy(params.Lr_nH) * kron3(ob.phi_sq.cast<cplx>(), ia, i1);
  return h;
}

Eigen::MatrixXcd phi_beta_operator(const ChargeCutoff &cutoff) {
  const ChargeOperators &ob = cached_charge_operators(cutoff.k);
  const auto ia = Eigen::MatrixXcd::Identity(2 * cutoff.l + 1, 2 * cutoff.l + 1);
  const auto i1 = Eigen::MatrixXcd::Identity(2 * cutoff.m + 1, 2 * cutoff.m + 1);
  return kron3(ob.phi, ia, i1);
}

ParityBasis make_parity_basis(const ChargeCutoff &cutoff) {
  ParityBasis basis;
  basis.cutoff = cutoff;
  const long n = cutoff.dimension();
  const long center = (n - 1) / 2;  // all charges zero
  basis.plus.reserve(static_cast<std::size_t>(n));
  basis.minus.reserve(static_cast<std::size_t>(n));
  basis.kind.reserve(static_cast<std::size_t>(n));
  basis.plus.push_back(center);
  basis.minus.push_back(center);
  basis.kind.push_back(0);
  // Reflecting every axis maps flat index p to n - 1 - p.
  for (long p = 0; p < center; ++p) {
    for (int kind : {1, 2}) {
      basis.plus.push_back(p);
      basis.minus.push_back(n - 1 - p);
      basis.kind.push_back(kind);
    }
  }
  return basis;
}

Eigen::SparseMatrix<std::complex<double>> ParityBasis::to_charge() const {
  const long n = dimension();
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * n));
  const double s = std::numbers::sqrt2 / 2.0;
  for (long k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    switch (kind[idx]) {
      case 0: triplets.emplace_back(plus[idx], k, 1.0); break;
      case 1:
        triplets.emplace_back(plus[idx], k, s);
        triplets.emplace_back(minus[idx], k, s);
        break;
      default:
        triplets.emplace_back(plus[idx], k, cplx(0.0, s));
        triplets.emplace_back(minus[idx], k, cplx(0.0, -s));
        break;
    }
  }
  Eigen::SparseMatrix<cplx> u(n, n);
  u.setFromTriplets(triplets.begin(), triplets.end());
  return u;
}

QubitOperators qubit_operators(const CircuitParams &params, double phi_ex,
                               const ChargeCutoff &cutoff, const CircuitOptions &options) {
  params.validate();
  check_dimension(cutoff, options);
  const Eigen::Matrix3d minv = mass_matrix(params).inverse();
  const int nb = 2 * cutoff.k + 1, na = 2 * cutoff.l + 1, n1 = 2 * cutoff.m + 1;
  const long n = cutoff.dimension();
  auto flat = [&](int ib, int ia, int i1) { return (static_cast<long>(ib) * na + ia) * n1 + i1; };
  const double el_half = 0.5 * resonator_inductive_energy(params.Lr_nH);
  const cplx hop_b = -0.5 * params.EJ * params.b * std::exp(cplx(0.0, phi_ex));

  std::vector<Eigen::Triplet<cplx>> h_entries, phi_entries;
  h_entries.reserve(static_cast<std::size_t>(n) * (8 + static_cast<std::size_t>(nb)));
  phi_entries.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(nb));
  for (int ib = 0; ib < nb; ++ib) {
    for (int ia = 0; ia < na; ++ia) {
      for (int i1 = 0; i1 < n1; ++i1) {
        const long col = flat(ib, ia, i1);
        const Eigen::Vector3d q(ib - cutoff.k, ia - cutoff.l, i1 - cutoff.m);
        const double kinetic = 4.0 * params.Ec * q.dot(minv * q);
        h_entries.emplace_back(col, col, kinetic + el_half * std::numbers::pi * std::numbers::pi / 3.0);
        for (int step : {-1, 1}) {
          if (ib + step >= 0 && ib + step < nb)
            h_entries.emplace_back(flat(ib + step, ia, i1), col, -0.5 * params.EJ * params.beta);
          if (ia + step >= 0 && ia + step < na)
            h_entries.emplace_back(flat(ib, ia + step, i1), col, -0.5 * params.EJ * params.alpha);
          if (i1 + step >= 0 && i1 + step < n1)
            h_entries.emplace_back(flat(ib, ia, i1 + step), col, -0.5 * params.EJ);
        }
        // exp(-i phi) raises the charge by one on every axis at once.
        if (ib + 1 < nb && ia + 1 < na && i1 + 1 < n1)
          h_entries.emplace_back(flat(ib + 1, ia + 1, i1 + 1), col, hop_b);
        if (ib > 0 && ia > 0 && i1 > 0)
          h_entries.emplace_back(flat(ib - 1, ia - 1, i1 - 1), col, std::conj(hop_b));
        for (int jb = 0; jb < nb; ++jb) {
          if (jb == ib) continue;
          const int d = ib - jb;  // q - q'
          const double sign = (d % 2 == 0) ? 1.0 : -1.0;
          const long row = flat(jb, ia, i1);
          h_entries.emplace_back(row, col, el_half * 2.0 * sign / (d * d));
          phi_entries.emplace_back(row, col, cplx(0.0, sign / d));
        }
      }
    }
  }
  Eigen::SparseMatrix<cplx> h(n, n), phi(n, n);
  h.setFromTriplets(h_entries.begin(), h_entries.end());
  phi.setFromTriplets(phi_entries.begin(), phi_entries.end());

  QubitOperators ops;
  ops.basis = make_parity_basis(cutoff);
  const Eigen::SparseMatrix<cplx> u = ops.basis.to_charge();
  const Eigen::SparseMatrix<cplx> ud = u.adjoint();
  const Eigen::SparseMatrix<cplx> hp = ud * h * u;
  const Eigen::SparseMatrix<cplx> pp = ud * phi * u;
  ops.hamiltonian = hp.real();
  ops.phi_beta = pp.real();
  ops.hamiltonian.prune(0.0);
  ops.phi_beta.prune(0.0);
  return ops;
}

QubitEigensystem qubit_eigensystem(const QubitOperators &ops, int qubit_space, EigenMethod method,
                                   const LanczosOptions &lanczos) {
  if (qubit_space < 1 || qubit_space > ops.basis.dimension())
    throw InvalidArgument("qubit space exceeds the qubit matrix dimension", "qubit_space");
  const EigenPairs pairs = lowest_eigenpairs(ops.hamiltonian, qubit_space, method, lanczos);
  QubitEigensystem sys;
  sys.energies = pairs.values;
  sys.vectors = pairs.vectors;
  sys.phi_beta = pairs.vectors.transpose() * (ops.phi_beta * pairs.vectors);
  sys.phi_beta = 0.5 * (sys.phi_beta + sys.phi_beta.transpose()).eval();
  const auto &c = ops.basis.cutoff;
  sys.basis_descriptor = "charge-parity(beta,alpha,a row-major; k=" + std::to_string(c.k) +
                         ",l=" + std::to_string(c.l) + ",m=" + std::to_string(c.m) + ")";
  return sys;
}

ComplexQubitEigensystem qubit_eigensystem(const Eigen::MatrixXcd &hamiltonian,
                                          const Eigen::MatrixXcd &phi_beta, int qubit_space) {
  if (qubit_space < 1 || qubit_space > hamiltonian.rows())
    throw InvalidArgument("qubit space exceeds the qubit matrix dimension", "qubit_space");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian);
  if (es.info() != Eigen::Success) throw NumericalError("complex eigensolver failed");
  ComplexQubitEigensystem sys;
  sys.energies = es.eigenvalues().head(qubit_space);
  sys.vectors = es.eigenvectors().leftCols(qubit_space);
  sys.phi_beta = sys.vectors.adjoint() * phi_beta * sys.vectors;
  return sys;
}

ResonatorConstants resonator_constants(double Lr_nH, double Cr_fF) {
  if (!(Lr_nH > 0.0 && Cr_fF > 0.0))
    throw InvalidArgument("resonator L and C must be positive", "resonator");
  const double l = Lr_nH * units::kNano;
  const double c = Cr_fF * units::kFemto;
  const double omega = 1.0 / std::sqrt(l * c);
  ResonatorConstants r;
  r.omega_r = omega / (2.0 * std::numbers::pi) / units::kGHz;
  r.I_r = std::sqrt(units::kHbar / (2.0 * l * std::sqrt(l * c)));
  return r;
}

double coupling_prefactor(const ResonatorConstants &res, CouplingConvention convention) {
  const double flux = convention == CouplingConvention::FluxOverTwoPi
                          ? units::kFluxQuantum / (2.0 * std::numbers::pi)
                          : units::kFluxQuantum;
  return units::joule_to_ghz(res.I_r * flux);
}

namespace {

template <typename Mat>
Mat assemble_total(const Eigen::VectorXd &energies, const Mat &phi, const ResonatorConstants &res,
                   int fock, CouplingConvention convention) {
  if (fock < 2) throw InvalidArgument("Fock truncation must be >= 2", "fock");
  const Eigen::Index q = energies.size();
  const double g = coupling_prefactor(res, convention);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(fock, fock);
  for (int n = 1; n < fock; ++n) x(n - 1, n) = x(n, n - 1) = std::sqrt(static_cast<double>(n));
  Mat h = Mat::Zero(q * fock, q * fock);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (int n = 0; n < fock; ++n) h(i * fock + n, i * fock + n) = energies(i) + res.omega_r * (n + 0.5);
    for (Eigen::Index j = 0; j < q; ++j) {
      h.block(i * fock, j * fock, fock, fock) += (g * phi(i, j)) * x;
    }
  }
  return h;
}

}  // namespace

Eigen::MatrixXd total_hamiltonian(const QubitEigensystem &qubit, const ResonatorConstants &res,
                                  int fock, CouplingConvention convention) {
  return assemble_total<Eigen::MatrixXd>(qubit.energies, qubit.phi_beta, res, fock, convention);
}

Eigen::MatrixXcd total_hamiltonian(const ComplexQubitEigensystem &qubit,
                                   const ResonatorConstants &res, int fock,
                                   CouplingConvention convention) {
  return assemble_total<Eigen::MatrixXcd>(qubit.energies, qubit.phi_beta, res, fock, convention);
}

Eigen::VectorXd circuit_spectrum(const CircuitParams &params, double flux,
                                 const TruncationConfig &trunc, int levels,
                                 const CircuitOptions &options) {
  trunc.validate();
  const QubitOperators ops = qubit_operators(params, 2.0 * std::numbers::pi * flux, trunc.charge, options);
  const QubitEigensystem sys = qubit_eigensystem(ops, trunc.qubit_space, options.eigen_method, options.lanczos);
  const ResonatorConstants res = resonator_constants(params.Lr_nH, params.Cr_fF);
  const Eigen::MatrixXd h = total_hamiltonian(sys, res, trunc.fock, options.coupling);
  return dense_symmetric_eigen(h, levels, false).values;
}

Eigen::VectorXd qubit_spectrum(const CircuitParams &params, double flux,
                               const ChargeCutoff &cutoff, int levels,
                               const CircuitOptions &options) {
  const QubitOperators ops = qubit_operators(params, 2.0 * std::numbers::pi * flux, cutoff, options);
  return lowest_eigenpairs(ops.hamiltonian, levels, options.eigen_method, options.lanczos).values;
}

std::pair<int, int> parse_transition(const std::string &label) {
  std::string digits;
  std::size_t pos = 0;
  if (label.rfind("w", 0) == 0) pos = 1;
  else if (label.rfind("omega", 0) == 0) pos = 5;
  else if (label.rfind("\xcf\x89", 0) == 0) pos = 2;  // UTF-8 omega
  else throw InvalidArgument("unknown transition label '" + label + "'", "label");
  const std::string rest = label.substr(pos);
  int upper = -1, lower = -1;
  const auto sep = rest.find('_');
  try {
    if (sep != std::string::npos) {
      upper = std::stoi(rest.substr(0, sep));
      lower = std::stoi(rest.substr(sep + 1));
    } else if (rest.size() == 2 && std::isdigit(static_cast<unsigned char>(rest[0])) &&
               std::isdigit(static_cast<unsigned char>(rest[1]))) {
      upper = rest[0] - '0';
      lower = rest[1] - '0';
    }
  } catch (const std::exception &) {
  }
  if (upper < 0 || lower < 0 || upper <= lower)
    throw InvalidArgument("transition label '" + label + "' must name levels i > j", "label");
  return {upper, lower};
}

std::string transition_label(std::pair<int, int> pair) {
  if (pair.first < 10 && pair.second < 10)
    return "w" + std::to_string(pair.first) + std::to_string(pair.second);
  return "w" + std::to_string(pair.first) + "_" + std::to_string(pair.second);
}

std::vector<double> transition_frequencies(const Eigen::VectorXd &energies,
                                           const std::vector<std::pair<int, int>> &pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto &[i, j] : pairs) {
    if (i <= j || j < 0 || i >= energies.size())
      throw InvalidArgument("transition (" + std::to_string(i) + "," + std::to_string(j) +
                                ") out of range",
                            "pairs");
    out.push_back(energies(i) - energies(j));
  }
  return out;
}

BiasCalibration::BiasCalibration(double I0_mA, double slope_per_mA) : I0(I0_mA), slope(slope_per_mA) {
  if (slope == 0.0 || !std::isfinite(slope))
    throw InvalidArgument("current-to-flux slope must be non-zero", "slope");
}

double BiasCalibration::persistent_current_nA(double eps_slope_GHz_per_mA) const {
  const double ip = units::kPlanck * eps_slope_GHz_per_mA * units::kGHz /
                    (2.0 * units::kFluxQuantum * slope);
  return ip / units::kNano;
}

double flux_detuning(double Ip_nA, double flux) {
  return units::joule_to_ghz(2.0 * Ip_nA * units::kNano * units::kFluxQuantum * (flux - 0.5));
}

}  // namespace scspec
