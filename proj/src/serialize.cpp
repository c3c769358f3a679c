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

#include "scspec/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "scspec/error.hpp"

namespace scspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double number(const Json &j, const std::string &key, const std::string &field) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument("missing '" + key + "'", field.empty() ? key : field);
  const Json &v = j.at(key);
  if (!v.is_number()) throw InvalidArgument("'" + key + "' must be a number", field.empty() ? key : field);
  return v.get<double>();
}

double number_or(const Json &j, const std::string &key, double fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_number()) throw InvalidArgument("'" + key + "' must be a number", key);
  return j.at(key).get<double>();
}

int int_or(const Json &j, const std::string &key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw InvalidArgument("'" + key + "' must be an integer", key);
  return j.at(key).get<int>();
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

int parse_id(const std::string &key, const std::string &field) {
  std::size_t pos = 0;
  int id = 0;
  try {
    id = std::stoi(key, &pos);
  } catch (const std::exception &) {
    pos = 0;
  }
  if (pos != key.size()) throw InvalidArgument("group key '" + key + "' is not an integer", field);
  return id;
}

std::vector<int> int_list(const Json &j, const std::string &field) {
  if (!j.is_array()) throw InvalidArgument("expected an array of contour ids", field);
  std::vector<int> out;
  for (const auto &v : j) {
    if (!v.is_number_integer()) throw InvalidArgument("contour ids must be integers", field);
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

Json to_json(const CircuitParams &p) {
  return {{"EJ_GHz", p.EJ}, {"Ec_GHz", p.Ec}, {"alpha", p.alpha}, {"beta", p.beta},
          {"b", p.b},       {"Lr_nH", p.Lr_nH}, {"Cr_fF", p.Cr_fF}};
}

Json to_json(const RabiParams &p) {
  return {{"g_GHz", p.g},
          {"delta_GHz", p.delta},
          {"omega_r_GHz", p.omega_r},
          {"eps_tilde_GHz_per_mA", p.eps_slope},
          {"I0_mA", p.I0},
          {"A_minus_per_mA", p.A_minus},
          {"A_plus_per_mA", p.A_plus}};
}

Json to_json(const FluxoniumParams &p) { return {{"EJ_GHz", p.EJ}, {"EC_GHz", p.EC}, {"EL_GHz", p.EL}}; }

Json to_json(const TruncationConfig &t) {
  return {{"fock", t.fock},
          {"charge", {t.charge.k, t.charge.l, t.charge.m}},
          {"qubit_space", t.qubit_space},
          {"fluxonium_basis", t.fluxonium_basis}};
}

CircuitParams circuit_params_from_json(const Json &j) {
  CircuitParams p;
  p.EJ = number_or(j, "EJ_GHz", p.EJ);
  p.Ec = number_or(j, "Ec_GHz", p.Ec);
  p.alpha = number_or(j, "alpha", p.alpha);
  p.beta = number_or(j, "beta", p.beta);
  p.b = number_or(j, "b", p.b);
  p.Lr_nH = number_or(j, "Lr_nH", p.Lr_nH);
  p.Cr_fF = number_or(j, "Cr_fF", p.Cr_fF);
  p.validate();
  return p;
}

RabiParams rabi_params_from_json(const Json &j) {
  RabiParams p;
  p.g = number_or(j, "g_GHz", p.g);
  p.delta = number_or(j, "delta_GHz", p.delta);
  p.omega_r = number_or(j, "omega_r_GHz", p.omega_r);
  p.eps_slope = number_or(j, "eps_tilde_GHz_per_mA", p.eps_slope);
  p.I0 = number_or(j, "I0_mA", p.I0);
  p.A_minus = number_or(j, "A_minus_per_mA", p.A_minus);
  p.A_plus = number_or(j, "A_plus_per_mA", p.A_plus);
  p.validate();
  return p;
}

FluxoniumParams fluxonium_params_from_json(const Json &j) {
  FluxoniumParams p;
  p.EJ = number_or(j, "EJ_GHz", p.EJ);
  p.EC = number_or(j, "EC_GHz", p.EC);
  p.EL = number_or(j, "EL_GHz", p.EL);
  p.validate();
  return p;
}

TruncationConfig truncation_from_json(const Json &j) {
  TruncationConfig t;
  if (!j.is_object()) throw InvalidArgument("truncation must be an object", "trunc");
  t.fock = int_or(j, "fock", t.fock);
  t.qubit_space = int_or(j, "qubit_space", t.qubit_space);
  t.fluxonium_basis = int_or(j, "fluxonium_basis", t.fluxonium_basis);
  if (j.contains("charge")) {
    const std::vector<int> c = int_list(j.at("charge"), "charge");
    if (c.size() != 3) throw InvalidArgument("charge needs three cutoffs (k, l, m)", "charge");
    t.charge = {c[0], c[1], c[2]};
  }
  t.validate();
  return t;
}

Json matrix_to_json(const Matrix &m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json &j, const std::string &field) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows", field);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw InvalidArgument("ragged matrix row " + std::to_string(r), field);
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InvalidArgument("non-numeric matrix entry", field);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Json to_json(const ContourSet &set) {
  Json contours = Json::array();
  for (const auto &c : set.contours) {
    Json verts = Json::array();
    for (const auto &p : c.vertices) verts.push_back({p.row, p.col});
    contours.push_back({{"id", c.id}, {"closed", c.closed}, {"vertices", std::move(verts)}});
  }
  return {{"level", set.level}, {"rows", set.rows}, {"cols", set.cols}, {"contours", std::move(contours)}};
}

ContourSet contour_set_from_json(const Json &j) {
  ContourSet set;
  set.level = number(j, "level", "level");
  set.rows = static_cast<Eigen::Index>(number_or(j, "rows", 0));
  set.cols = static_cast<Eigen::Index>(number_or(j, "cols", 0));
  if (!j.contains("contours") || !j.at("contours").is_array())
    throw InvalidArgument("missing 'contours' array", "contours");
  for (const auto &c : j.at("contours")) {
    Contour contour;
    contour.id = static_cast<int>(number(c, "id", "contours"));
    contour.closed = c.value("closed", false);
    contour.level = set.level;
    for (const auto &v : c.at("vertices")) {
      if (!v.is_array() || v.size() != 2) throw InvalidArgument("vertices must be [row, col] pairs", "vertices");
      contour.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    set.contours.push_back(std::move(contour));
  }
  return set;
}

Json to_json(const GroupAssignment &a) {
  Json groups = Json::object(), labels = Json::object();
  for (const auto &[id, members] : a.groups) groups[std::to_string(id)] = members;
  for (const auto &[id, label] : a.transition_labels) labels[std::to_string(id)] = label;
  return {{"groups", groups}, {"transitions", labels}, {"ignored", a.ignored}};
}

GroupAssignment assignment_from_json(const Json &j) {
  if (!j.is_object()) throw InvalidArgument("assignment must be an object", "assignment");
  GroupAssignment a;
  if (!j.contains("groups") || !j.at("groups").is_object())
    throw InvalidArgument("missing 'groups' object", "groups");
  for (auto it = j.at("groups").begin(); it != j.at("groups").end(); ++it)
    a.groups[parse_id(it.key(), "groups")] = int_list(it.value(), "groups");
  if (j.contains("transitions")) {
    if (!j.at("transitions").is_object()) throw InvalidArgument("'transitions' must be an object", "transitions");
    for (auto it = j.at("transitions").begin(); it != j.at("transitions").end(); ++it) {
      if (!it.value().is_string()) throw InvalidArgument("transition labels must be strings", "transitions");
      const int id = parse_id(it.key(), "transitions");
      if (!a.groups.count(id)) throw InvalidArgument("transition label for unknown group " + it.key(), "transitions");
      const std::string label = it.value().get<std::string>();
      parse_transition(label);
      a.transition_labels[id] = label;
    }
  }
  if (j.contains("ignored")) a.ignored = int_list(j.at("ignored"), "ignored");
  a.validate();
  return a;
}

std::string to_string(PeakMethod method) {
  return method == PeakMethod::RegionMin ? "region-min" : "lorentzian-fit";
}

PeakMethod peak_method_from_string(const std::string &name) {
  if (name == "region-min") return PeakMethod::RegionMin;
  if (name == "lorentzian-fit") return PeakMethod::LorentzianFit;
  throw InvalidArgument("unknown peak method '" + name + "'", "method");
}

Json to_json(const PeakSet &peaks) {
  Json groups = Json::object();
  for (const auto &[id, points] : peaks.groups) {
    Json list = Json::array();
    for (const auto &p : points)
      list.push_back({{"bias_index", p.bias_index}, {"bias", p.bias}, {"freq", p.freq}, {"amplitude", p.amplitude}});
    groups[std::to_string(id)] = std::move(list);
  }
  Json tied = Json::array(), skipped = Json::array();
  for (const auto &[g, c] : peaks.tied_columns) tied.push_back({g, c});
  for (const auto &[g, c] : peaks.skipped_columns) skipped.push_back({g, c});
  return {{"method", to_string(peaks.method)}, {"groups", groups}, {"tied_columns", tied}, {"skipped_columns", skipped}};
}

PeakSet peak_set_from_json(const Json &j) {
  PeakSet peaks;
  peaks.method = peak_method_from_string(j.value("method", std::string("region-min")));
  if (!j.contains("groups") || !j.at("groups").is_object()) throw InvalidArgument("missing 'groups'", "groups");
  for (auto it = j.at("groups").begin(); it != j.at("groups").end(); ++it) {
    std::vector<PeakPoint> pts;
    for (const auto &p : it.value())
      pts.push_back({static_cast<int>(number(p, "bias_index", "groups")), number(p, "bias", "groups"),
                     number(p, "freq", "groups"), number_or(p, "amplitude", 0.0)});
    peaks.groups[parse_id(it.key(), "groups")] = std::move(pts);
  }
  return peaks;
}

std::string format_peaks_csv(const PeakSet &peaks) {
  std::ostringstream os;
  os << "group,bias_index,bias,freq,amplitude\n";
  for (const auto &[id, points] : peaks.groups)
    for (const auto &p : points)
      os << id << ',' << p.bias_index << ',' << g17(p.bias) << ',' << g17(p.freq) << ',' << g17(p.amplitude) << '\n';
  return os.str();
}

std::vector<Observation> observations_from_peaks(const PeakSet &peaks, const GroupAssignment &assignment) {
  std::vector<Observation> out;
  for (const auto &[id, points] : peaks.groups) {
    const auto label = assignment.transition_labels.find(id);
    if (label == assignment.transition_labels.end())
      throw InvalidArgument("group " + std::to_string(id) + " has no transition label", "transitions");
    for (const auto &p : points) out.push_back({label->second, p.bias, p.freq, 1.0});
  }
  return out;
}

Json to_json(const FitProblem &problem) {
  Json obs = Json::array();
  for (const auto &o : problem.observations)
    obs.push_back({{"label", o.label}, {"bias", o.bias}, {"freq_GHz", o.freq}, {"weight", o.weight}});
  Json params = Json::array();
  for (const auto &p : problem.parameters)
    params.push_back({{"name", p.name},
                      {"unit", parameter_unit(problem.model, p.name)},
                      {"initial", p.initial},
                      {"lower", finite_or_null(p.lower)},
                      {"upper", finite_or_null(p.upper)},
                      {"frozen", p.frozen}});
  Json schedule = Json::array();
  for (const auto &t : problem.schedule) schedule.push_back(to_json(t));
  Json j = {{"model", to_string(problem.model)},
            {"bias_unit", problem.bias_unit == BiasUnit::Flux ? "flux" : "mA"},
            {"observations", obs},
            {"trunc", to_json(problem.trunc)},
            {"parameters", params},
            {"schedule", schedule},
            {"multistart", problem.multistart},
            {"multistart_spread", problem.multistart_spread},
            {"seed", problem.seed},
            {"refine_fraction", problem.refine_fraction},
            {"polish", problem.polish},
            {"polish_max_evaluations", problem.polish_max_evaluations},
            {"coupling", problem.circuit_options.coupling == CouplingConvention::FluxOverTwoPi ? "flux_over_2pi"
                                                                                              : "flux_quantum"},
            {"simplex",
             {{"initial_fraction", problem.simplex.initial_fraction},
              {"ftol_GHz", problem.simplex.ftol},
              {"max_evaluations", problem.simplex.max_evaluations},
              {"restarts", problem.simplex.restarts}}}};
  if (problem.calibration)
    j["calibration"] = {{"I0_mA", problem.calibration->I0}, {"slope_per_mA", problem.calibration->slope}};
  return j;
}

FitProblem fit_problem_from_json(const Json &j) {
  if (!j.is_object()) throw InvalidArgument("fit problem must be an object", "problem");
  FitProblem p;
  p.model = model_from_string(j.value("model", std::string("rabi")));
  const std::string unit = j.value("bias_unit", std::string(p.model == ModelKind::Rabi ? "mA" : "flux"));
  if (unit == "mA") p.bias_unit = BiasUnit::Current_mA;
  else if (unit == "flux") p.bias_unit = BiasUnit::Flux;
  else throw InvalidArgument("bias_unit must be 'mA' or 'flux'", "bias_unit");
  if (j.contains("trunc")) p.trunc = truncation_from_json(j.at("trunc"));
  if (!j.contains("observations") || !j.at("observations").is_array())
    throw InvalidArgument("missing 'observations' array", "observations");
  for (const auto &o : j.at("observations")) {
    if (!o.contains("label") || !o.at("label").is_string())
      throw InvalidArgument("observation needs a string 'label'", "observations");
    p.observations.push_back({o.at("label").get<std::string>(), number(o, "bias", "observations"),
                              o.contains("freq_GHz") ? number(o, "freq_GHz", "observations")
                                                     : number(o, "freq", "observations"),
                              number_or(o, "weight", 1.0)});
  }
  switch (p.model) {
    case ModelKind::Rabi:
      p.parameters = rabi_parameters(j.contains("initial") ? rabi_params_from_json(j.at("initial")) : RabiParams{});
      break;
    case ModelKind::Circuit:
      p.parameters = circuit_parameters(j.contains("initial") ? circuit_params_from_json(j.at("initial")) : CircuitParams{});
      break;
    case ModelKind::Fluxonium:
      p.parameters = fluxonium_parameters(j.contains("initial") ? fluxonium_params_from_json(j.at("initial")) : FluxoniumParams{});
      break;
  }
  if (j.contains("parameters")) {
    if (!j.at("parameters").is_array()) throw InvalidArgument("'parameters' must be an array", "parameters");
    for (const auto &entry : j.at("parameters")) {
      const std::string name = entry.value("name", std::string());
      auto it = std::find_if(p.parameters.begin(), p.parameters.end(), [&](const ParameterSpec &s) { return s.name == name; });
      if (it == p.parameters.end()) throw InvalidArgument("unknown parameter '" + name + "'", "parameters");
      it->initial = number_or(entry, "initial", it->initial);
      it->lower = number_or(entry, "lower", it->lower);
      it->upper = number_or(entry, "upper", it->upper);
      if (entry.contains("frozen")) it->frozen = entry.at("frozen").get<bool>();
    }
  }
  if (j.contains("frozen")) {
    for (const auto &name : j.at("frozen")) {
      auto it = std::find_if(p.parameters.begin(), p.parameters.end(),
                             [&](const ParameterSpec &s) { return s.name == name.get<std::string>(); });
      if (it == p.parameters.end()) throw InvalidArgument("unknown frozen parameter", "frozen");
      it->frozen = true;
    }
  }
  if (j.contains("schedule"))
    for (const auto &t : j.at("schedule")) p.schedule.push_back(truncation_from_json(t));
  p.multistart = int_or(j, "multistart", p.multistart);
  p.multistart_spread = number_or(j, "multistart_spread", p.multistart_spread);
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  p.refine_fraction = number_or(j, "refine_fraction", p.refine_fraction);
  p.polish = j.value("polish", p.polish);
  p.polish_max_evaluations = j.value("polish_max_evaluations", p.polish_max_evaluations);
  if (j.contains("coupling")) {
    const std::string c = j.at("coupling").get<std::string>();
    if (c == "flux_over_2pi") p.circuit_options.coupling = CouplingConvention::FluxOverTwoPi;
    else if (c == "flux_quantum") p.circuit_options.coupling = CouplingConvention::FluxQuantum;
    else throw InvalidArgument("coupling must be 'flux_over_2pi' or 'flux_quantum'", "coupling");
  }
  if (j.contains("simplex")) {
    const Json &s = j.at("simplex");
    p.simplex.initial_fraction = number_or(s, "initial_fraction", p.simplex.initial_fraction);
    p.simplex.ftol = number_or(s, "ftol_GHz", p.simplex.ftol);
    p.simplex.max_evaluations = int_or(s, "max_evaluations", p.simplex.max_evaluations);
    p.simplex.restarts = int_or(s, "restarts", p.simplex.restarts);
  }
  if (j.contains("calibration")) {
    const Json &c = j.at("calibration");
    p.calibration = BiasCalibration(number(c, "I0_mA", "calibration"), number(c, "slope_per_mA", "calibration"));
  }
  p.validate();
  return p;
}

Json to_json(const FitResult &r) {
  Json params = Json::object(), history = Json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    const std::string unit = parameter_unit(r.model, r.names[i]);
    params[unit.empty() ? r.names[i] : r.names[i] + "_" + unit] = r.values(static_cast<Eigen::Index>(i));
    if (i < r.parameter_history.size()) history[r.names[i]] = r.parameter_history[i];
  }
  Json stages = Json::array();
  for (const auto &s : r.stages)
    stages.push_back({{"trunc", to_json(s.trunc)},
                      {"start_rms_GHz", s.start_rms},
                      {"rms_GHz", s.rms},
                      {"evaluations", s.evaluations},
                      {"converged", s.converged}});
  std::vector<double> residuals(r.residuals.data(), r.residuals.data() + r.residuals.size());
  std::vector<double> values(r.values.data(), r.values.data() + r.values.size());
  return {{"model", to_string(r.model)},
          {"parameters", params},
          {"names", r.names},
          {"values", values},
          {"residuals_GHz", residuals},
          {"rms_GHz", r.rms},
          {"iterations", r.iterations},
          {"evaluations", r.evaluations},
          {"converged", r.converged},
          {"cancelled", r.cancelled},
          {"rms_history_GHz", r.rms_history},
          {"parameter_history", history},
          {"stages", stages}};
}

FitResult fit_result_from_json(const Json &j) {
  FitResult r;
  r.model = model_from_string(j.value("model", std::string("rabi")));
  if (!j.contains("names") || !j.contains("values")) throw InvalidArgument("fit result needs names and values", "fit");
  r.names = j.at("names").get<std::vector<std::string>>();
  const auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != r.names.size()) throw InvalidArgument("names and values differ in length", "fit");
  r.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  const auto residuals = j.value("residuals_GHz", std::vector<double>{});
  r.residuals = Eigen::Map<const Eigen::VectorXd>(residuals.data(), static_cast<Eigen::Index>(residuals.size()));
  r.rms = number_or(j, "rms_GHz", 0.0);
  r.iterations = int_or(j, "iterations", 0);
  r.evaluations = int_or(j, "evaluations", 0);
  r.converged = j.value("converged", false);
  r.cancelled = j.value("cancelled", false);
  r.rms_history = j.value("rms_history_GHz", std::vector<double>{});
  if (j.contains("parameter_history"))
    for (const auto &n : r.names)
      r.parameter_history.push_back(j.at("parameter_history").value(n, std::vector<double>{}));
  if (j.contains("stages"))
    for (const auto &s : j.at("stages")) {
      StageReport st;
      st.trunc = truncation_from_json(s.at("trunc"));
      st.start_rms = number_or(s, "start_rms_GHz", 0.0);
      st.rms = number_or(s, "rms_GHz", 0.0);
      st.evaluations = int_or(s, "evaluations", 0);
      st.converged = s.value("converged", false);
      r.stages.push_back(st);
    }
  return r;
}

std::string format_eigen_csv(const std::vector<double> &bias, const std::vector<Eigen::VectorXd> &levels) {
  if (bias.size() != levels.size()) throw InvalidArgument("bias and level lists differ in length");
  std::ostringstream os;
  os << "bias,level,energy_GHz\n";
  for (std::size_t b = 0; b < bias.size(); ++b)
    for (Eigen::Index k = 0; k < levels[b].size(); ++k) os << g17(bias[b]) << ',' << k << ',' << g17(levels[b](k)) << '\n';
  return os.str();
}

Json to_json(const ConvergenceReport &report) {
  Json j = {{"axis", to_string(report.axis)},
            {"metric", report.metric},
            {"settings", report.settings},
            {"reference", report.reference},
            {"values", report.values},
            {"bias", report.bias},
            {"per_bias", matrix_to_json(report.per_bias)}};
  Json series = Json::object();
  for (const auto &[name, values] : report.series) series[name] = values;
  j["series"] = series;
  if (report.ground_energy.size()) j["ground_energy_GHz"] = matrix_to_json(report.ground_energy);
  Json labels = Json::array();
  for (const auto &t : report.transitions) labels.push_back(transition_label(t));
  j["transitions"] = labels;
  return j;
}

std::string format_convergence_csv(const ConvergenceReport &report) {
  std::ostringstream os;
  os << "setting," << report.metric;
  for (double b : report.bias) os << ",bias_" << g17(b);
  os << '\n';
  for (std::size_t s = 0; s < report.settings.size(); ++s) {
    os << '"' << report.settings[s] << "\"," << g17(report.values[s]);
    for (Eigen::Index b = 0; b < report.per_bias.cols(); ++b)
      os << ',' << g17(report.per_bias(static_cast<Eigen::Index>(s), b));
    os << '\n';
  }
  return os.str();
}

Json to_json(const PrecisionStudy &study) {
  Json rows = Json::array();
  for (const auto &r : study.rows) rows.push_back({{"sigma_g", r.sigma_g}, {"sigma_p", r.sigma_p}, {"mean_peak", r.mean_peak}});
  return {{"rows", rows}, {"slope", study.slope}, {"intercept", study.intercept}, {"r_squared", study.r_squared}};
}

std::string format_precision_csv(const PrecisionStudy &study) {
  std::ostringstream os;
  os << "sigma_g,sigma_p,mean_peak\n";
  for (const auto &r : study.rows) os << g17(r.sigma_g) << ',' << g17(r.sigma_p) << ',' << g17(r.mean_peak) << '\n';
  return os.str();
}

Json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error &e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << text;
  if (!out) throw Error("io", "failed writing " + path.string());
}

}  // namespace scspec
