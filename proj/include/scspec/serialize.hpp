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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "scspec/contour.hpp"
#include "scspec/convergence.hpp"
#include "scspec/fit.hpp"
#include "scspec/hamiltonian.hpp"
#include "scspec/peaks.hpp"
#include "scspec/spectrum.hpp"

namespace scspec {

using Json = nlohmann::json;

// Parameter records; key names carry their unit ("EJ_GHz", "Lr_nH", ...).
Json to_json(const CircuitParams &p);
Json to_json(const RabiParams &p);
Json to_json(const FluxoniumParams &p);
Json to_json(const TruncationConfig &t);
CircuitParams circuit_params_from_json(const Json &j);
RabiParams rabi_params_from_json(const Json &j);
FluxoniumParams fluxonium_params_from_json(const Json &j);
TruncationConfig truncation_from_json(const Json &j);

Json matrix_to_json(const Matrix &m);
Matrix matrix_from_json(const Json &j, const std::string &field = "matrix");

// {"level": x, "rows": r, "cols": c, "contours": [{"id", "closed", "vertices": [[r, c], ...]}]}
Json to_json(const ContourSet &set);
ContourSet contour_set_from_json(const Json &j);

// {"groups": {"0": [0, 1]}, "transitions": {"0": "w10"}, "ignored": [...]}
Json to_json(const GroupAssignment &a);
GroupAssignment assignment_from_json(const Json &j);

std::string to_string(PeakMethod method);
PeakMethod peak_method_from_string(const std::string &name);
Json to_json(const PeakSet &peaks);
PeakSet peak_set_from_json(const Json &j);
/// CSV with header group,bias_index,bias,freq,amplitude.
std::string format_peaks_csv(const PeakSet &peaks);

/// Observations from a peak set: one per point, label from the assignment.
std::vector<Observation> observations_from_peaks(const PeakSet &peaks, const GroupAssignment &assignment);

Json to_json(const FitProblem &problem);
FitProblem fit_problem_from_json(const Json &j);
Json to_json(const FitResult &result);
FitResult fit_result_from_json(const Json &j);

/// CSV rows "bias,level,energy_GHz".
std::string format_eigen_csv(const std::vector<double> &bias, const std::vector<Eigen::VectorXd> &levels);

Json to_json(const ConvergenceReport &report);
/// CSV: setting, summary metric, then one column per bias point.
std::string format_convergence_csv(const ConvergenceReport &report);

Json to_json(const PrecisionStudy &study);
std::string format_precision_csv(const PrecisionStudy &study);

Json read_json_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

}  // namespace scspec
