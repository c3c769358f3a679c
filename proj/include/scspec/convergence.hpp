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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scspec/hamiltonian.hpp"

namespace scspec {

enum class ConvergenceAxis { Fock, Charge, QubitSpace };

std::string to_string(ConvergenceAxis axis);

struct ConvergenceReport {
  ConvergenceAxis axis = ConvergenceAxis::Fock;
  std::string metric;                 // e.g. "max_summed_deviation_GHz"
  std::vector<std::string> settings;  // swept setting labels
  std::string reference;
  std::vector<double> values;         // summary metric per setting
  std::vector<double> bias;           // flux phi_ex / 2pi of each bias point
  Eigen::MatrixXd per_bias;           // settings x bias
  /// Transition frequencies per setting (bias x transitions), when produced.
  std::vector<Eigen::MatrixXd> spectra;
  std::vector<std::pair<int, int>> transitions;
  /// Additional named per-setting series (e.g. ground energies, ratios).
  std::vector<std::pair<std::string, std::vector<double>>> series;
  Eigen::MatrixXd ground_energy;      // settings x bias, when produced

  /// Index of the first setting whose metric is within `tol`.
  std::optional<std::size_t> first_within(double tol) const;
};

/// Evenly spaced flux points in [lo, hi].
std::vector<double> flux_points(double lo, double hi, int count);

const std::vector<std::pair<int, int>> &default_transitions();  // w10, w20, w31

struct FockSweep {
  double g = 3.45;
  double delta = 0.83;
  double omega_r = 5.17;
  double Ip_nA = 323.0;  // maps flux to eps through flux_detuning
  std::vector<int> fock_values = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  int fock_ref = 14;
  std::vector<std::pair<int, int>> transitions = default_transitions();
  std::vector<double> flux = flux_points(0.49, 0.50, 21);
};

struct FockConvergence {
  ConvergenceReport deviation;  // max over flux of summed |w(F) - w(F_ref)|
  ConvergenceReport ratio;      // w(F) / w(F_ref) at eps = 0, per transition
};

FockConvergence fock_convergence(const FockSweep &sweep);

struct ChargeSweep {
  std::vector<ChargeCutoff> cutoffs = {{6, 6, 6}, {9, 6, 7}, {8, 7, 8}, {9, 7, 7}};
  ChargeCutoff reference{9, 9, 9};
  std::vector<double> flux = flux_points(0.49, 0.50, 11);
  CircuitOptions options{};
  unsigned threads = 0;
};

/// |E01(k,l,m) - E01(reference)| per bias point; summary = max over bias.
ConvergenceReport charge_convergence(const CircuitParams &params, const ChargeSweep &sweep);

struct QubitSpaceSweep {
  std::vector<int> q_values = {5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25};
  int q_ref = 25;
  int fock = 13;
  ChargeCutoff cutoff{9, 6, 7};
  std::vector<std::pair<int, int>> transitions = default_transitions();
  std::vector<double> flux = flux_points(0.49, 0.50, 21);
  CircuitOptions options{};
  unsigned threads = 0;
};

/// Summed transition deviation vs Q_ref per bias (max over bias as summary).
/// The qubit eigenbasis is computed once at Q_ref and truncated, so the
/// retained subspaces are nested and `ground_energy` is non-increasing in Q.
ConvergenceReport qubit_space_convergence(const CircuitParams &params, const QubitSpaceSweep &sweep);

/// Label helpers used in reports.
std::string cutoff_label(const ChargeCutoff &c);

}  // namespace scspec
