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

#include "scspec/convergence.hpp"

#include <cmath>
#include <numbers>

#include "scspec/error.hpp"
#include "scspec/parallel.hpp"

namespace scspec {

std::string to_string(ConvergenceAxis axis) {
  switch (axis) {
    case ConvergenceAxis::Fock: return "fock";
    case ConvergenceAxis::Charge: return "charge";
    case ConvergenceAxis::QubitSpace: return "qubit_space";
  }
  return "unknown";
}

std::optional<std::size_t> ConvergenceReport::first_within(double tol) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] <= tol) return i;
  return std::nullopt;
}

std::vector<double> flux_points(double lo, double hi, int count) {
  if (count < 1) throw InvalidArgument("bias point count must be positive", "count");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

const std::vector<std::pair<int, int>> &default_transitions() {
  static const std::vector<std::pair<int, int>> pairs = {{1, 0}, {2, 0}, {3, 1}};
  return pairs;
}

std::string cutoff_label(const ChargeCutoff &c) {
  return "(" + std::to_string(c.k) + "," + std::to_string(c.l) + "," + std::to_string(c.m) + ")";
}

namespace {

int levels_needed(const std::vector<std::pair<int, int>> &pairs) {
  int top = 1;
  for (const auto &[i, j] : pairs) {
    if (i <= j || j < 0) throw InvalidArgument("transition pairs need i > j >= 0", "transitions");
    top = std::max(top, i + 1);
  }
  return top;
}

Eigen::VectorXd rabi_transitions(double g, double delta, double omega, double eps, int fock,
                                 const std::vector<std::pair<int, int>> &pairs) {
  const Eigen::MatrixXd h = rabi_hamiltonian(g, delta, omega, eps, fock);
  const Eigen::VectorXd e = dense_symmetric_eigen(h, levels_needed(pairs), false).values;
  const std::vector<double> w = transition_frequencies(e, pairs);
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

}  // namespace

FockConvergence fock_convergence(const FockSweep &sweep) {
  if (sweep.fock_ref < 2) throw InvalidArgument("reference Fock size must be >= 2", "fock_ref");
  for (int f : sweep.fock_values)
    if (f < 2 || f > sweep.fock_ref)
      throw InvalidArgument("Fock values must lie in [2, fock_ref]", "fock_values");
  const int need = levels_needed(sweep.transitions);
  const auto nf = static_cast<Eigen::Index>(sweep.fock_values.size());
  const auto nb = static_cast<Eigen::Index>(sweep.flux.size());
  const auto nt = static_cast<Eigen::Index>(sweep.transitions.size());

  FockConvergence out;
  ConvergenceReport &dev = out.deviation;
  dev.axis = ConvergenceAxis::Fock;
  dev.metric = "max_summed_deviation_GHz";
  dev.reference = std::to_string(sweep.fock_ref);
  dev.bias = sweep.flux;
  dev.transitions = sweep.transitions;
  dev.per_bias = Eigen::MatrixXd::Zero(nf, nb);
  dev.ground_energy = Eigen::MatrixXd::Zero(nf, nb);

  std::vector<double> eps(sweep.flux.size());
  for (std::size_t b = 0; b < sweep.flux.size(); ++b) eps[b] = flux_detuning(sweep.Ip_nA, sweep.flux[b]);

  Eigen::MatrixXd ref(nb, nt);
  for (Eigen::Index b = 0; b < nb; ++b)
    ref.row(b) = rabi_transitions(sweep.g, sweep.delta, sweep.omega_r, eps[static_cast<std::size_t>(b)],
                                  sweep.fock_ref, sweep.transitions).transpose();

  for (Eigen::Index s = 0; s < nf; ++s) {
    const int f = sweep.fock_values[static_cast<std::size_t>(s)];
    if (2 * f < need) throw InvalidArgument("Fock size too small for the requested transitions", "fock_values");
    dev.settings.push_back(std::to_string(f));
    Eigen::MatrixXd spec(nb, nt);
    for (Eigen::Index b = 0; b < nb; ++b) {
      const double e = eps[static_cast<std::size_t>(b)];
      const Eigen::MatrixXd h = rabi_hamiltonian(sweep.g, sweep.delta, sweep.omega_r, e, f);
      const Eigen::VectorXd levels = dense_symmetric_eigen(h, need, false).values;
      const std::vector<double> w = transition_frequencies(levels, sweep.transitions);
      for (Eigen::Index t = 0; t < nt; ++t) spec(b, t) = w[static_cast<std::size_t>(t)];
      dev.per_bias(s, b) = (spec.row(b) - ref.row(b)).cwiseAbs().sum();
      dev.ground_energy(s, b) = levels(0);
    }
    dev.spectra.push_back(spec);
    dev.values.push_back(dev.per_bias.row(s).maxCoeff());
  }

  ConvergenceReport &ratio = out.ratio;
  ratio.axis = ConvergenceAxis::Fock;
  ratio.metric = "ratio_to_reference";
  ratio.reference = dev.reference;
  ratio.settings = dev.settings;
  ratio.bias = {0.5};
  ratio.transitions = sweep.transitions;
  const Eigen::VectorXd ref0 =
      rabi_transitions(sweep.g, sweep.delta, sweep.omega_r, 0.0, sweep.fock_ref, sweep.transitions);
  ratio.per_bias = Eigen::MatrixXd::Zero(nf, 1);
  std::vector<std::vector<double>> per_transition(static_cast<std::size_t>(nt));
  for (Eigen::Index s = 0; s < nf; ++s) {
    const Eigen::VectorXd w = rabi_transitions(sweep.g, sweep.delta, sweep.omega_r, 0.0,
                                               sweep.fock_values[static_cast<std::size_t>(s)], sweep.transitions);
    double worst = 1.0;
    for (Eigen::Index t = 0; t < nt; ++t) {
      const double r = w(t) / ref0(t);
      per_transition[static_cast<std::size_t>(t)].push_back(r);
      if (std::abs(r - 1.0) > std::abs(worst - 1.0)) worst = r;
    }
    ratio.values.push_back(worst);
    ratio.per_bias(s, 0) = worst;
  }
  for (Eigen::Index t = 0; t < nt; ++t)
    ratio.series.emplace_back("ratio_" + transition_label(sweep.transitions[static_cast<std::size_t>(t)]),
                              per_transition[static_cast<std::size_t>(t)]);
  return out;
}

ConvergenceReport charge_convergence(const CircuitParams &params, const ChargeSweep &sweep) {
  params.validate();
  for (const auto &c : sweep.cutoffs)
    if (c.k > sweep.reference.k || c.l > sweep.reference.l || c.m > sweep.reference.m)
      throw InvalidArgument("cutoff " + cutoff_label(c) + " exceeds the reference", "cutoffs");
  if (sweep.reference.dimension() > sweep.options.max_dimension)
    throw NumericalError("reference cutoff exceeds the matrix-size cap");

  const std::size_t nb = sweep.flux.size();
  const std::size_t ns = sweep.cutoffs.size();
  // Cell (setting, bias); setting index ns is the reference.
  Eigen::MatrixXd e01(static_cast<Eigen::Index>(ns + 1), static_cast<Eigen::Index>(nb));
  parallel_for((ns + 1) * nb, [&](std::size_t cell) {
    const std::size_t s = cell / nb, b = cell % nb;
    const ChargeCutoff &c = s == ns ? sweep.reference : sweep.cutoffs[s];
    const Eigen::VectorXd e = qubit_spectrum(params, sweep.flux[b], c, 2, sweep.options);
    e01(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(b)) = e(1) - e(0);
  }, sweep.threads);

  ConvergenceReport rep;
  rep.axis = ConvergenceAxis::Charge;
  rep.metric = "max_abs_E01_deviation_GHz";
  rep.reference = cutoff_label(sweep.reference);
  rep.bias = sweep.flux;
  rep.per_bias.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(nb));
  for (std::size_t s = 0; s < ns; ++s) {
    rep.settings.push_back(cutoff_label(sweep.cutoffs[s]));
    const auto row = static_cast<Eigen::Index>(s);
    rep.per_bias.row(row) = (e01.row(row) - e01.row(static_cast<Eigen::Index>(ns))).cwiseAbs();
    rep.values.push_back(rep.per_bias.row(row).maxCoeff());
  }
  std::vector<double> ref_row(nb);
  for (std::size_t b = 0; b < nb; ++b) ref_row[b] = e01(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(b));
  rep.series.emplace_back("reference_E01_GHz", std::move(ref_row));
  return rep;
}

ConvergenceReport qubit_space_convergence(const CircuitParams &params, const QubitSpaceSweep &sweep) {
  params.validate();
  if (sweep.q_ref < 2) throw InvalidArgument("reference qubit space must be >= 2", "q_ref");
  for (int q : sweep.q_values)
    if (q < 2 || q > sweep.q_ref) throw InvalidArgument("Q values must lie in [2, q_ref]", "q_values");
  const int need = levels_needed(sweep.transitions);
  const ResonatorConstants res = resonator_constants(params.Lr_nH, params.Cr_fF);
  const std::size_t nb = sweep.flux.size();
  const std::size_t ns = sweep.q_values.size();
  const auto nt = static_cast<Eigen::Index>(sweep.transitions.size());

  // spectra_all[s][b] holds transitions; index ns is the reference.
  std::vector<Eigen::MatrixXd> spectra(ns + 1, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nb), nt));
  Eigen::MatrixXd ground(static_cast<Eigen::Index>(ns + 1), static_cast<Eigen::Index>(nb));
  parallel_for(nb, [&](std::size_t b) {
    const QubitOperators ops =
        qubit_operators(params, 2.0 * std::numbers::pi * sweep.flux[b], sweep.cutoff, sweep.options);
    const QubitEigensystem full =
        qubit_eigensystem(ops, sweep.q_ref, sweep.options.eigen_method, sweep.options.lanczos);
    for (std::size_t s = 0; s <= ns; ++s) {
      const int q = s == ns ? sweep.q_ref : sweep.q_values[s];
      QubitEigensystem sub;
      sub.energies = full.energies.head(q);
      sub.phi_beta = full.phi_beta.topLeftCorner(q, q);
      const Eigen::MatrixXd h = total_hamiltonian(sub, res, sweep.fock, sweep.options.coupling);
      if (h.rows() < need) throw InvalidArgument("truncation too small for the requested transitions", "q_values");
      const Eigen::VectorXd e = dense_symmetric_eigen(h, need, false).values;
      const std::vector<double> w = transition_frequencies(e, sweep.transitions);
      for (Eigen::Index t = 0; t < nt; ++t)
        spectra[s](static_cast<Eigen::Index>(b), t) = w[static_cast<std::size_t>(t)];
      ground(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(b)) = e(0);
    }
  }, sweep.threads);

  ConvergenceReport rep;
  rep.axis = ConvergenceAxis::QubitSpace;
  rep.metric = "max_summed_deviation_GHz";
  rep.reference = std::to_string(sweep.q_ref);
  rep.bias = sweep.flux;
  rep.transitions = sweep.transitions;
  rep.per_bias.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(nb));
  rep.ground_energy = ground.topRows(static_cast<Eigen::Index>(ns));
  for (std::size_t s = 0; s < ns; ++s) {
    rep.settings.push_back(std::to_string(sweep.q_values[s]));
    for (std::size_t b = 0; b < nb; ++b) {
      const auto bi = static_cast<Eigen::Index>(b);
      rep.per_bias(static_cast<Eigen::Index>(s), bi) = (spectra[s].row(bi) - spectra[ns].row(bi)).cwiseAbs().sum();
    }
    rep.values.push_back(rep.per_bias.row(static_cast<Eigen::Index>(s)).maxCoeff());
    rep.spectra.push_back(spectra[s]);
  }
  return rep;
}

}  // namespace scspec
