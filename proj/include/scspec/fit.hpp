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

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scspec/hamiltonian.hpp"
#include "scspec/simplex.hpp"

namespace scspec {

enum class ModelKind { Rabi, Circuit, Fluxonium };

std::string to_string(ModelKind model);
ModelKind model_from_string(const std::string &name);

/// Bias axis of the observations.
enum class BiasUnit { Current_mA, Flux };

struct Observation {
  std::string label;  // transition, e.g. "w10"
  double bias = 0.0;  // mA or phi_ex / 2pi
  double freq = 0.0;  // GHz
  double weight = 1.0;
};

struct ParameterSpec {
  std::string name;
  double initial = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool frozen = false;
};

/// Default parameter table per model, seeded from the given record.
/// Rabi: g, delta, omega_r (GHz), eps_tilde (GHz/mA), I0 (mA), A_minus, A_plus (1/mA).
/// Circuit: EJ, Ec (GHz), alpha, beta, b, Lr (nH), Cr (fF); b frozen.
/// Fluxonium: EJ, EC, EL (GHz).
std::vector<ParameterSpec> rabi_parameters(const RabiParams &p);
std::vector<ParameterSpec> circuit_parameters(const CircuitParams &p);
std::vector<ParameterSpec> fluxonium_parameters(const FluxoniumParams &p);

/// Unit string of a model parameter ("GHz", "mA", "nH", ...; "" if dimensionless).
std::string parameter_unit(ModelKind model, const std::string &name);

struct FitProblem {
  ModelKind model = ModelKind::Rabi;
  std::vector<Observation> observations;
  TruncationConfig trunc{};
  std::vector<ParameterSpec> parameters;
  BiasUnit bias_unit = BiasUnit::Current_mA;
  std::optional<BiasCalibration> calibration;  // circuit/fluxonium with mA bias

  SimplexOptions simplex{};
  int multistart = 0;            // extra perturbed starts
  double multistart_spread = 0.1;
  std::uint64_t seed = 0;
  /// Truncation stages for circuit fits; empty = default rough/fine schedule.
  std::vector<TruncationConfig> schedule;
  double refine_fraction = 0.01;  // initial simplex edge for stages after the first
  /// Levenberg-Marquardt refinement of each simplex optimum.
  bool polish = true;
  int polish_max_evaluations = 400;
  CircuitOptions circuit_options{};
  unsigned threads = 0;

  void validate() const;
  std::size_t free_count() const;
};

/// Default schedule: (6,6,6) rough then (9,6,7) fine, Q = 25, F = 13.
std::vector<TruncationConfig> default_circuit_schedule();

struct StageReport {
  TruncationConfig trunc;
  double start_rms = 0.0;  // stage start point evaluated at this truncation
  double rms = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct FitResult {
  ModelKind model = ModelKind::Rabi;
  std::vector<std::string> names;
  Eigen::VectorXd values;
  Eigen::VectorXd residuals;  // model - observed, GHz
  double rms = 0.0;           // sqrt(sum w r^2 / sum w)
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool cancelled = false;
  std::vector<double> rms_history;
  std::vector<std::vector<double>> parameter_history;  // per parameter, per iteration
  std::vector<StageReport> stages;

  double value(const std::string &name) const;
  RabiParams rabi() const;
  CircuitParams circuit() const;
  FluxoniumParams fluxonium() const;
};

RabiParams rabi_from_values(const std::vector<std::string> &names, const Eigen::VectorXd &v);
CircuitParams circuit_from_values(const std::vector<std::string> &names, const Eigen::VectorXd &v);
FluxoniumParams fluxonium_from_values(const std::vector<std::string> &names, const Eigen::VectorXd &v);

/// Model transition frequencies for every observation (same order).
Eigen::VectorXd model_frequencies(const FitProblem &problem, const Eigen::VectorXd &values,
                                  const TruncationConfig &trunc);

/// Weighted rms residual of the model at `values`.
double weighted_rms(const FitProblem &problem, const Eigen::VectorXd &values,
                    const TruncationConfig &trunc, Eigen::VectorXd *residuals = nullptr);

FitResult fit_rabi(const FitProblem &problem);
FitResult fit_circuit(const FitProblem &problem);
FitResult fit_fluxonium(const FitProblem &problem);
/// Dispatch on problem.model.
FitResult fit(const FitProblem &problem);

/// Clean pseudo-observations from a Rabi model: one per (label, bias).
std::vector<Observation> sample_model_curve(const RabiParams &params,
                                            const std::vector<std::string> &labels,
                                            const std::vector<double> &bias_mA, int fock = 13);

/// Human-readable report (parameters with units, rms, iterations).
std::string format_fit_report(const FitResult &result);

}  // namespace scspec
