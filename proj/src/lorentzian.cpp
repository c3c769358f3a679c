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

#include "scspec/error.hpp"
#include "scspec/peaks.hpp"

namespace scspec {

namespace {

double residuals(const std::vector<double> &f, const std::vector<double> &a,
                 const Eigen::Vector4d &p, Eigen::VectorXd &r) {
  const double w2 = p[1] * p[1];
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - p[0];
    r[static_cast<Eigen::Index>(i)] = p[3] - p[2] * w2 / (4.0 * d * d + w2) - a[i];
  }
  return r.squaredNorm();
}

void jacobian(const std::vector<double> &f, const Eigen::Vector4d &p, Eigen::MatrixXd &jac) {
  const double w = p[1], w2 = w * w, depth = p[2];
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double d = f[i] - p[0];
    const double den = 4.0 * d * d + w2;
    const double den2 = den * den;
    jac(row, 0) = -depth * 8.0 * w2 * d / den2;
    jac(row, 1) = -depth * 8.0 * w * d * d / den2;
    jac(row, 2) = -w2 / den;
    jac(row, 3) = 1.0;
  }
}

}  // namespace

LorentzianFit lorentzian_fit_1d(const std::vector<double> &freq,
                                const std::vector<double> &amplitude,
                                std::optional<LorentzianParams> init,
                                const LorentzianFitOptions &options) {
  if (freq.size() != amplitude.size())
    throw InvalidArgument("frequency and amplitude lengths differ", "column");
  if (freq.size() < 5) throw InvalidArgument("Lorentzian fit needs at least 5 points", "column");
  const auto [lo_it, hi_it] = std::minmax_element(amplitude.begin(), amplitude.end());
  if (!(*hi_it > *lo_it)) throw NumericalError("flat column: nothing to fit");
  const double span = std::abs(freq.back() - freq.front());
  const double step = span / static_cast<double>(freq.size() - 1);

  Eigen::Vector4d p;
  if (init) {
    p << init->center, init->fwhm, init->depth, init->offset;
  } else {
    std::vector<double> sorted = amplitude;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                     sorted.end());
    const double offset = sorted[sorted.size() / 2];
    const double depth = std::max(offset - *lo_it, 1e-12 * (std::abs(offset) + 1.0));
    // Width of the half-depth dip when it spans more than the default 3 steps.
    const double half = offset - 0.5 * depth;
    std::size_t below = 0;
    for (double v : amplitude) below += v < half ? 1 : 0;
    const double fwhm = std::max(3.0, static_cast<double>(below)) * step;
    p << freq[static_cast<std::size_t>(lo_it - amplitude.begin())], fwhm, depth, offset;
  }
  if (!(p[1] > 0.0)) throw InvalidArgument("initial FWHM must be positive", "init");

  const auto n = static_cast<Eigen::Index>(freq.size());
  Eigen::VectorXd r(n), r_trial(n);
  Eigen::MatrixXd jac(n, 4);
  double cost = residuals(freq, amplitude, p, r);
  double lambda = 1e-3;
  auto finish = [&](int iterations) {
    if (!(p[2] > 0.0)) throw NumericalError("Lorentzian fit converged to a non-positive depth");
    LorentzianFit out;
    out.params = {p[0], p[1], p[2], p[3]};
    out.residual_norm = std::sqrt(cost);
    out.iterations = iterations;
    return out;
  };
  const double scale = std::max(1.0, amplitude.size() * (*hi_it - *lo_it) * (*hi_it - *lo_it));
  for (int it = 1; it <= options.max_iterations; ++it) {
    jacobian(freq, p, jac);
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d grad = jac.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::Matrix4d a = jtj;
      for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      const Eigen::Vector4d delta = a.ldlt().solve(-grad);
      Eigen::Vector4d trial = p + delta;
      trial[1] = std::abs(trial[1]);
      if (!trial.allFinite() || trial[1] == 0.0) {
        lambda *= 10.0;
        continue;
      }
      const double trial_cost = residuals(freq, amplitude, trial, r_trial);
      if (trial_cost <= cost) {
        const double rel_step = delta.cwiseAbs().cwiseQuotient(p.cwiseAbs().cwiseMax(1e-12 * span + 1e-300)).maxCoeff();
        const double drop = cost - trial_cost;
        p = trial;
        r = r_trial;
        cost = trial_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (rel_step < options.tolerance || drop <= options.tolerance * cost ||
            cost <= 1e-30 * scale) {
          return finish(it);
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No downhill step at any damping: at a minimum to working precision.
      return finish(it);
    }
  }
  throw NumericalError("Lorentzian fit did not converge in " +
                       std::to_string(options.max_iterations) + " iterations");
}

}  // namespace scspec
