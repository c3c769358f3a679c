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

#include "scspec/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "scspec/error.hpp"
#include "scspec/parallel.hpp"

namespace scspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> &expected_names(ModelKind model) {
  static const std::vector<std::string> rabi = {"g", "delta", "omega_r", "eps_tilde", "I0", "A_minus", "A_plus"};
  static const std::vector<std::string> circuit = {"EJ", "Ec", "alpha", "beta", "b", "Lr", "Cr"};
  static const std::vector<std::string> fluxonium = {"EJ", "EC", "EL"};
  switch (model) {
    case ModelKind::Rabi: return rabi;
    case ModelKind::Circuit: return circuit;
    case ModelKind::Fluxonium: return fluxonium;
  }
  return rabi;
}

double lookup(const std::vector<std::string> &names, const Eigen::VectorXd &v, const std::string &name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return v(static_cast<Eigen::Index>(i));
  throw InvalidArgument("missing parameter '" + name + "'", name);
}

std::vector<std::string> names_of(const FitProblem &problem) {
  std::vector<std::string> out;
  for (const auto &p : problem.parameters) out.push_back(p.name);
  return out;
}

Eigen::VectorXd initial_values(const FitProblem &problem) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(problem.parameters.size()));
  for (std::size_t i = 0; i < problem.parameters.size(); ++i) v(static_cast<Eigen::Index>(i)) = problem.parameters[i].initial;
  return v;
}

std::vector<std::size_t> free_indices(const FitProblem &problem) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < problem.parameters.size(); ++i)
    if (!problem.parameters[i].frozen) out.push_back(i);
  return out;
}

bool within_bounds(const FitProblem &problem, const Eigen::VectorXd &v) {
  for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
    const double x = v(static_cast<Eigen::Index>(i));
    if (!(x >= problem.parameters[i].lower && x <= problem.parameters[i].upper)) return false;
  }
  return true;
}

struct Run {
  Eigen::VectorXd values;
  double rms = kInf;
  SimplexResult simplex;
};

// Weighted residuals sqrt(w / sum w) (model - observed) over the free
// coordinates, with a forward-difference Jacobian.
struct Residuals : Eigen::DenseFunctor<double> {
  const FitProblem *problem;
  const TruncationConfig *trunc;
  std::function<Eigen::VectorXd(const Eigen::VectorXd &)> expand;
  const SimplexOptions *options;
  Eigen::VectorXd scale;
  int *evaluations;
  int budget;
  bool *cancelled;

  Residuals(int n, int m) : Eigen::DenseFunctor<double>(n, m) {}

  int operator()(const Eigen::VectorXd &x, Eigen::VectorXd &f) const {
    if (options->cancel && options->cancel()) {
      *cancelled = true;
      return -1;
    }
    if (*evaluations >= budget) return -1;
    ++*evaluations;
    const Eigen::VectorXd full = expand(x);
    f = Eigen::VectorXd::Constant(values(), 1e3);
    if (!within_bounds(*problem, full)) return 0;
    try {
      Eigen::VectorXd r;
      weighted_rms(*problem, full, *trunc, &r);
      if (r.allFinite()) f = r.cwiseProduct(scale);
    } catch (const Error &) {
    }
    return 0;
  }

  int df(const Eigen::VectorXd &x, Eigen::MatrixXd &jac) const {
    Eigen::VectorXd f0, f1;
    if ((*this)(x, f0) < 0) return -1;
    jac.resize(values(), inputs());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      Eigen::VectorXd xh = x;
      const double h = x(j) != 0.0 ? 1e-6 * std::abs(x(j)) : 1e-6;
      xh(j) += h;
      if ((*this)(xh, f1) < 0) return -1;
      jac.col(j) = (f1 - f0) / h;
    }
    return 0;
  }
};

// Levenberg-Marquardt from the simplex optimum; keeps the better point.
// Coordinates with a non-negative lower bound are refined in log space.
void polish(const FitProblem &problem, const TruncationConfig &trunc,
            const std::function<Eigen::VectorXd(const Eigen::VectorXd &)> &expand,
            const SimplexOptions &options, SimplexResult &simplex) {
  const int m = static_cast<int>(problem.observations.size());
  const int n = static_cast<int>(simplex.x.size());
  if (m < n || simplex.cancelled || !std::isfinite(simplex.value)) return;
  const std::vector<std::size_t> free = free_indices(problem);
  std::vector<bool> logged(free.size());
  for (std::size_t k = 0; k < free.size(); ++k)
    logged[k] = problem.parameters[free[k]].lower >= 0.0 && simplex.x(static_cast<Eigen::Index>(k)) > 0.0;
  auto to_x = [&](Eigen::VectorXd y) {
    for (std::size_t k = 0; k < free.size(); ++k)
      if (logged[k]) y(static_cast<Eigen::Index>(k)) = std::exp(y(static_cast<Eigen::Index>(k)));
    return y;
  };
  double wsum = 0.0;
  for (const auto &o : problem.observations) wsum += o.weight;
  Residuals fn(n, m);
  fn.problem = &problem;
  fn.trunc = &trunc;
  fn.expand = [&](const Eigen::VectorXd &y) { return expand(to_x(y)); };
  fn.options = &options;
  fn.scale.resize(m);
  for (int i = 0; i < m; ++i) fn.scale(i) = std::sqrt(problem.observations[static_cast<std::size_t>(i)].weight / wsum);
  int evaluations = 0;
  bool cancelled = false;
  fn.evaluations = &evaluations;
  fn.budget = problem.polish_max_evaluations;
  fn.cancelled = &cancelled;

  Eigen::LevenbergMarquardt<Residuals> lm(fn);
  lm.setMaxfev(problem.polish_max_evaluations);
  lm.setXtol(1e-10);
  lm.setFtol(1e-12);
  Eigen::VectorXd y = simplex.x;
  for (std::size_t k = 0; k < free.size(); ++k)
    if (logged[k]) y(static_cast<Eigen::Index>(k)) = std::log(y(static_cast<Eigen::Index>(k)));
  lm.minimize(y);

  simplex.evaluations += evaluations;
  simplex.cancelled = simplex.cancelled || cancelled;
  if (cancelled) return;
  Eigen::VectorXd f;
  fn.budget = evaluations + 1;
  if (fn(y, f) < 0) return;
  ++simplex.evaluations;
  const double value = f.norm();
  if (value < simplex.value) {
    simplex.x = to_x(y);
    simplex.value = value;
    ++simplex.iterations;
    simplex.history.push_back(simplex.x);
    simplex.value_history.push_back(value);
  }
}

// Nelder-Mead over the free coordinates of `start` at a fixed truncation,
// optionally preceded (`reseat`) and followed by a least-squares pass.
Run run_simplex(const FitProblem &problem, const TruncationConfig &trunc, const Eigen::VectorXd &start,
                const SimplexOptions &options, bool reseat = false) {
  const std::vector<std::size_t> free = free_indices(problem);
  Eigen::VectorXd x0(static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) x0(static_cast<Eigen::Index>(k)) = start(static_cast<Eigen::Index>(free[k]));
  auto expand = [&](const Eigen::VectorXd &x) {
    Eigen::VectorXd full = start;
    for (std::size_t k = 0; k < free.size(); ++k) full(static_cast<Eigen::Index>(free[k])) = x(static_cast<Eigen::Index>(k));
    return full;
  };
  auto objective = [&](const Eigen::VectorXd &x) {
    const Eigen::VectorXd full = expand(x);
    if (!within_bounds(problem, full)) return kInf;
    try {
      return weighted_rms(problem, full, trunc);
    } catch (const Error &) {
      return kInf;
    }
  };
  Run run;
  SimplexResult pre;
  if (reseat && problem.polish) {
    pre.x = x0;
    pre.value = objective(x0);
    pre.evaluations = 1;
    polish(problem, trunc, expand, options, pre);
    x0 = pre.x;
  }
  if (pre.cancelled) {
    run.simplex = pre;
  } else {
    run.simplex = nelder_mead(objective, x0, options);
    run.simplex.evaluations += pre.evaluations;
    run.simplex.iterations += pre.iterations;
    run.simplex.history.insert(run.simplex.history.begin(), pre.history.begin(), pre.history.end());
    run.simplex.value_history.insert(run.simplex.value_history.begin(), pre.value_history.begin(),
                                     pre.value_history.end());
    if (problem.polish) polish(problem, trunc, expand, options, run.simplex);
  }
  run.values = expand(run.simplex.x);
  run.rms = run.simplex.value;
  return run;
}

std::vector<Eigen::VectorXd> start_points(const FitProblem &problem) {
  std::vector<Eigen::VectorXd> starts = {initial_values(problem)};
  std::mt19937_64 engine(problem.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < problem.multistart; ++k) {
    Eigen::VectorXd v = starts.front();
    for (std::size_t i = 0; i < problem.parameters.size(); ++i) {
      const ParameterSpec &p = problem.parameters[i];
      if (p.frozen) continue;
      const double base = p.initial != 0.0 ? p.initial : 1.0;
      double x = p.initial + problem.multistart_spread * std::abs(base) * unit(engine);
      v(static_cast<Eigen::Index>(i)) = std::clamp(x, p.lower, p.upper);
    }
    starts.push_back(v);
  }
  return starts;
}

void append_history(FitResult &result, const FitProblem &problem, const Run &run) {
  const std::vector<std::size_t> free = free_indices(problem);
  if (result.parameter_history.empty()) result.parameter_history.resize(problem.parameters.size());
  Eigen::VectorXd full = run.values;
  for (std::size_t it = 0; it < run.simplex.history.size(); ++it) {
    for (std::size_t k = 0; k < free.size(); ++k)
      full(static_cast<Eigen::Index>(free[k])) = run.simplex.history[it](static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < problem.parameters.size(); ++i)
      result.parameter_history[i].push_back(full(static_cast<Eigen::Index>(i)));
    result.rms_history.push_back(run.simplex.value_history[it]);
  }
  result.iterations += run.simplex.iterations;
  result.evaluations += run.simplex.evaluations;
}

// Best of the configured starts at one truncation.
Run best_of_starts(const FitProblem &problem, const TruncationConfig &trunc,
                   const std::vector<Eigen::VectorXd> &starts, const SimplexOptions &options,
                   FitResult &result, bool reseat = false) {
  Run best;
  for (const auto &s : starts) {
    Run run = run_simplex(problem, trunc, s, options, reseat);
    if (!best.values.size() || run.rms < best.rms) {
      if (best.values.size()) {
        result.iterations += best.simplex.iterations;
        result.evaluations += best.simplex.evaluations;
      }
      best = std::move(run);
    } else {
      result.iterations += run.simplex.iterations;
      result.evaluations += run.simplex.evaluations;
    }
    if (best.simplex.cancelled) break;
  }
  return best;
}

void finish(FitResult &result, const FitProblem &problem, const Run &best, const TruncationConfig &trunc) {
  result.model = problem.model;
  result.names = names_of(problem);
  result.values = best.values;
  result.converged = best.simplex.converged;
  result.cancelled = best.simplex.cancelled;
  result.rms = weighted_rms(problem, best.values, trunc, &result.residuals);
}

}  // namespace

std::string to_string(ModelKind model) {
  switch (model) {
    case ModelKind::Rabi: return "rabi";
    case ModelKind::Circuit: return "circuit";
    case ModelKind::Fluxonium: return "fluxonium";
  }
  return "unknown";
}

ModelKind model_from_string(const std::string &name) {
  if (name == "rabi") return ModelKind::Rabi;
  if (name == "circuit") return ModelKind::Circuit;
  if (name == "fluxonium") return ModelKind::Fluxonium;
  throw InvalidArgument("unknown model '" + name + "'", "model");
}

std::vector<ParameterSpec> rabi_parameters(const RabiParams &p) {
  return {{"g", p.g, 0.0, kInf, false},
          {"delta", p.delta, 0.0, kInf, false},
          {"omega_r", p.omega_r, 0.0, kInf, false},
          {"eps_tilde", p.eps_slope, -kInf, kInf, false},
          {"I0", p.I0, -kInf, kInf, false},
          {"A_minus", p.A_minus, -kInf, kInf, false},
          {"A_plus", p.A_plus, -kInf, kInf, false}};
}

std::vector<ParameterSpec> circuit_parameters(const CircuitParams &p) {
  return {{"EJ", p.EJ, 0.0, kInf, false},   {"Ec", p.Ec, 0.0, kInf, false},
          {"alpha", p.alpha, 0.0, kInf, false}, {"beta", p.beta, 0.0, kInf, false},
          {"b", p.b, 0.0, kInf, true},      {"Lr", p.Lr_nH, 0.0, kInf, false},
          {"Cr", p.Cr_fF, 0.0, kInf, false}};
}

std::vector<ParameterSpec> fluxonium_parameters(const FluxoniumParams &p) {
  return {{"EJ", p.EJ, 0.0, kInf, false}, {"EC", p.EC, 0.0, kInf, false}, {"EL", p.EL, 0.0, kInf, false}};
}

std::string parameter_unit(ModelKind model, const std::string &name) {
  if (model == ModelKind::Rabi) {
    if (name == "eps_tilde") return "GHz_per_mA";
    if (name == "I0") return "mA";
    if (name == "A_minus" || name == "A_plus") return "per_mA";
    return "GHz";
  }
  if (model == ModelKind::Circuit) {
    if (name == "EJ" || name == "Ec") return "GHz";
    if (name == "Lr") return "nH";
    if (name == "Cr") return "fF";
    return "";
  }
  return "GHz";
}

std::size_t FitProblem::free_count() const {
  return static_cast<std::size_t>(std::count_if(parameters.begin(), parameters.end(),
                                                [](const ParameterSpec &p) { return !p.frozen; }));
}

void FitProblem::validate() const {
  const auto &expected = expected_names(model);
  if (parameters.size() != expected.size())
    throw InvalidArgument("parameter table does not match the " + to_string(model) + " model", "parameters");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const ParameterSpec &p = parameters[i];
    if (p.name != expected[i])
      throw InvalidArgument("expected parameter '" + expected[i] + "' at position " + std::to_string(i), "parameters");
    if (!std::isfinite(p.initial) || !(p.lower <= p.initial && p.initial <= p.upper))
      throw InvalidArgument("initial value of '" + p.name + "' is outside its bounds", p.name);
  }
  if (free_count() == 0) throw InvalidArgument("no free parameters", "parameters");
  if (polish_max_evaluations < 0)
    throw InvalidArgument("polish_max_evaluations must be non-negative", "polish_max_evaluations");
  if (observations.size() < free_count())
    throw InvalidArgument("under-determined problem: " + std::to_string(observations.size()) +
                              " observations for " + std::to_string(free_count()) + " free parameters",
                          "observations");
  for (const auto &o : observations) {
    parse_transition(o.label);
    if (!std::isfinite(o.bias) || !std::isfinite(o.freq))
      throw InvalidArgument("observations must be finite", "observations");
    if (!(o.weight > 0.0) || !std::isfinite(o.weight))
      throw InvalidArgument("observation weights must be positive", "weight");
  }
  if (model != ModelKind::Rabi && bias_unit == BiasUnit::Current_mA && !calibration)
    throw InvalidArgument("current bias needs a bias calibration for this model", "calibration");
  if (model == ModelKind::Rabi && bias_unit != BiasUnit::Current_mA)
    throw InvalidArgument("Rabi fits take bias current in mA", "bias_unit");
  trunc.validate();
  for (const auto &t : schedule) t.validate();
}

std::vector<TruncationConfig> default_circuit_schedule() {
  TruncationConfig rough;
  rough.charge = {6, 6, 6};
  rough.qubit_space = 25;
  rough.fock = 13;
  TruncationConfig fine = rough;
  fine.charge = {9, 6, 7};
  return {rough, fine};
}

double FitResult::value(const std::string &name) const { return lookup(names, values, name); }
RabiParams FitResult::rabi() const { return rabi_from_values(names, values); }
CircuitParams FitResult::circuit() const { return circuit_from_values(names, values); }
FluxoniumParams FitResult::fluxonium() const { return fluxonium_from_values(names, values); }

RabiParams rabi_from_values(const std::vector<std::string> &names, const Eigen::VectorXd &v) {
  RabiParams p;
  p.g = lookup(names, v, "g");
  p.delta = lookup(names, v, "delta");
  p.omega_r = lookup(names, v, "omega_r");
  p.eps_slope = lookup(names, v, "eps_tilde");
  p.I0 = lookup(names, v, "I0");
  p.A_minus = lookup(names, v, "A_minus");
  p.A_plus = lookup(names, v, "A_plus");
  return p;
}

CircuitParams circuit_from_values(const std::vector<std::string> &names, const Eigen::VectorXd &v) {
  CircuitParams p;
  p.EJ = lookup(names, v, "EJ");
  p.Ec = lookup(names, v, "Ec");
  p.alpha = lookup(names, v, "alpha");
  p.beta = lookup(names, v, "beta");
  p.b = lookup(names, v, "b");
  p.Lr_nH = lookup(names, v, "Lr");
  p.Cr_fF = lookup(names, v, "Cr");
  return p;
}

FluxoniumParams fluxonium_from_values(const std::vector<std::string> &names, const Eigen::VectorXd &v) {
  FluxoniumParams p;
  p.EJ = lookup(names, v, "EJ");
  p.EC = lookup(names, v, "EC");
  p.EL = lookup(names, v, "EL");
  return p;
}

Eigen::VectorXd model_frequencies(const FitProblem &problem, const Eigen::VectorXd &values,
                                  const TruncationConfig &trunc) {
  const std::vector<std::string> names = names_of(problem);
  std::vector<std::pair<int, int>> pairs;
  int need = 2;
  for (const auto &o : problem.observations) {
    pairs.push_back(parse_transition(o.label));
    need = std::max(need, pairs.back().first + 1);
  }
  std::map<double, std::vector<std::size_t>> by_bias;
  for (std::size_t i = 0; i < problem.observations.size(); ++i) by_bias[problem.observations[i].bias].push_back(i);
  std::vector<const std::pair<const double, std::vector<std::size_t>> *> groups;
  for (const auto &entry : by_bias) groups.push_back(&entry);

  auto flux_of = [&](double bias) {
    return problem.bias_unit == BiasUnit::Flux ? bias : problem.calibration->flux(bias);
  };

  Eigen::VectorXd out(static_cast<Eigen::Index>(problem.observations.size()));
  std::function<Eigen::VectorXd(double)> levels;
  switch (problem.model) {
    case ModelKind::Rabi: {
      const RabiParams p = rabi_from_values(names, values);
      p.validate();
      levels = [p, &trunc, need](double bias) { return rabi_levels(p, bias, trunc.fock, need); };
      break;
    }
    case ModelKind::Circuit: {
      const CircuitParams p = circuit_from_values(names, values);
      p.validate();
      levels = [&, p](double bias) {
        return circuit_spectrum(p, flux_of(bias), trunc, need, problem.circuit_options);
      };
      break;
    }
    case ModelKind::Fluxonium: {
      const FluxoniumParams p = fluxonium_from_values(names, values);
      p.validate();
      levels = [&, p](double bias) {
        return fluxonium_levels(p, 2.0 * std::numbers::pi * flux_of(bias), trunc.fluxonium_basis, need);
      };
      break;
    }
  }
  parallel_for(groups.size(), [&](std::size_t g) {
    const Eigen::VectorXd e = levels(groups[g]->first);
    if (e.size() < need) throw NumericalError("too few levels for the requested transitions");
    for (std::size_t idx : groups[g]->second) out(static_cast<Eigen::Index>(idx)) = e(pairs[idx].first) - e(pairs[idx].second);
  }, problem.threads);
  return out;
}

double weighted_rms(const FitProblem &problem, const Eigen::VectorXd &values, const TruncationConfig &trunc,
                    Eigen::VectorXd *residuals) {
  const Eigen::VectorXd model = model_frequencies(problem, values, trunc);
  double num = 0.0, den = 0.0;
  Eigen::VectorXd r(model.size());
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    const Observation &o = problem.observations[static_cast<std::size_t>(i)];
    r(i) = model(i) - o.freq;
    num += o.weight * r(i) * r(i);
    den += o.weight;
  }
  if (residuals) *residuals = r;
  return std::sqrt(num / den);
}

FitResult fit_rabi(const FitProblem &problem) {
  if (problem.model != ModelKind::Rabi) throw InvalidArgument("fit_rabi needs a Rabi problem", "model");
  problem.validate();
  FitResult result;
  const Run best = best_of_starts(problem, problem.trunc, start_points(problem), problem.simplex, result);
  append_history(result, problem, best);
  finish(result, problem, best, problem.trunc);
  return result;
}

FitResult fit_fluxonium(const FitProblem &problem) {
  if (problem.model != ModelKind::Fluxonium) throw InvalidArgument("fit_fluxonium needs a fluxonium problem", "model");
  problem.validate();
  FitResult result;
  const Run best = best_of_starts(problem, problem.trunc, start_points(problem), problem.simplex, result);
  append_history(result, problem, best);
  finish(result, problem, best, problem.trunc);
  return result;
}

FitResult fit_circuit(const FitProblem &problem) {
  if (problem.model != ModelKind::Circuit) throw InvalidArgument("fit_circuit needs a circuit problem", "model");
  problem.validate();
  const std::vector<TruncationConfig> schedule =
      problem.schedule.empty() ? default_circuit_schedule() : problem.schedule;

  // Optimizer steps skip the eigensolver's inertia verification; the final
  // residuals are recomputed with the caller's options.
  FitProblem inner = problem;
  inner.circuit_options.lanczos.verify_inertia = false;

  FitResult result;
  std::vector<Eigen::VectorXd> starts = start_points(problem);
  Run best;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    SimplexOptions options = problem.simplex;
    if (s > 0) {
      options.initial_fraction = problem.refine_fraction;
      options.initial_steps.clear();
    }
    StageReport stage;
    stage.trunc = schedule[s];
    stage.start_rms = weighted_rms(inner, starts.front(), schedule[s]);
    best = best_of_starts(inner, schedule[s], starts, options, result, s > 0);
    append_history(result, problem, best);
    stage.rms = best.rms;
    stage.evaluations = best.simplex.evaluations;
    stage.converged = best.simplex.converged;
    result.stages.push_back(stage);
    if (best.simplex.cancelled) break;
    starts = {best.values};
  }
  finish(result, problem, best, result.stages.back().trunc);
  return result;
}

FitResult fit(const FitProblem &problem) {
  switch (problem.model) {
    case ModelKind::Rabi: return fit_rabi(problem);
    case ModelKind::Circuit: return fit_circuit(problem);
    case ModelKind::Fluxonium: return fit_fluxonium(problem);
  }
  throw InvalidArgument("unknown model", "model");
}

std::vector<Observation> sample_model_curve(const RabiParams &params, const std::vector<std::string> &labels,
                                            const std::vector<double> &bias_mA, int fock) {
  params.validate();
  std::vector<std::pair<int, int>> pairs;
  int need = 2;
  for (const auto &l : labels) {
    pairs.push_back(parse_transition(l));
    need = std::max(need, pairs.back().first + 1);
  }
  std::vector<Observation> out;
  out.reserve(labels.size() * bias_mA.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    for (double bias : bias_mA) {
      const Eigen::VectorXd e = rabi_levels(params, bias, fock, need);
      out.push_back({labels[k], bias, e(pairs[k].first) - e(pairs[k].second), 1.0});
    }
  }
  return out;
}

std::string format_fit_report(const FitResult &result) {
  std::ostringstream os;
  os << to_string(result.model) << " fit\n";
  char line[160];
  for (std::size_t i = 0; i < result.names.size(); ++i) {
    const std::string unit = parameter_unit(result.model, result.names[i]);
    std::snprintf(line, sizeof line, "  %-10s = %.9g %s\n", result.names[i].c_str(),
                  result.values(static_cast<Eigen::Index>(i)), unit.c_str());
    os << line;
  }
  std::snprintf(line, sizeof line, "  rms        = %.6g MHz\n", result.rms * 1e3);
  os << line;
  os << "  iterations = " << result.iterations << ", evaluations = " << result.evaluations
     << ", converged = " << (result.converged ? "yes" : "no") << (result.cancelled ? " (cancelled)" : "") << "\n";
  for (std::size_t s = 0; s < result.stages.size(); ++s) {
    const auto &st = result.stages[s];
    std::snprintf(line, sizeof line, "  stage %zu (%d,%d,%d) Q=%d F=%d: rms %.6g -> %.6g MHz, %d evaluations\n", s + 1,
                  st.trunc.charge.k, st.trunc.charge.l, st.trunc.charge.m, st.trunc.qubit_space, st.trunc.fock,
                  st.start_rms * 1e3, st.rms * 1e3, st.evaluations);
    os << line;
  }
  return os.str();
}

}  // namespace scspec
