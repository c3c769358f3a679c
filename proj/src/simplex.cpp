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

#include "scspec/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scspec/error.hpp"

namespace scspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Stop {};

}  // namespace

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd &)> &objective,
                          const Eigen::VectorXd &start, const SimplexOptions &options) {
  const Eigen::Index n = start.size();
  if (n < 1) throw InvalidArgument("simplex needs at least one free parameter");
  if (!options.initial_steps.empty() && static_cast<Eigen::Index>(options.initial_steps.size()) != n)
    throw InvalidArgument("initial_steps size must match the parameter count", "initial_steps");

  SimplexResult result;
  result.x = start;
  result.value = kInf;

  auto eval = [&](const Eigen::VectorXd &x) {
    if (options.cancel && options.cancel()) {
      result.cancelled = true;
      throw Stop{};
    }
    if (result.evaluations >= options.max_evaluations) throw Stop{};
    ++result.evaluations;
    double f = objective(x);
    if (!std::isfinite(f)) f = kInf;
    if (f < result.value) {
      result.value = f;
      result.x = x;
    }
    return f;
  };

  auto edge = [&](Eigen::Index i, const Eigen::VectorXd &center) {
    if (!options.initial_steps.empty()) return options.initial_steps[static_cast<std::size_t>(i)];
    return center(i) != 0.0 ? options.initial_fraction * center(i) : options.zero_step;
  };

  try {
    for (int round = 0; round <= options.restarts; ++round) {
      const double round_start_value = result.value;
      std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), result.x);
      std::vector<double> vals(static_cast<std::size_t>(n + 1));
      const Eigen::VectorXd center = result.x;
      vals[0] = round == 0 ? eval(center) : result.value;
      for (Eigen::Index i = 0; i < n; ++i) {
        pts[static_cast<std::size_t>(i + 1)](i) += edge(i, center);
        vals[static_cast<std::size_t>(i + 1)] = eval(pts[static_cast<std::size_t>(i + 1)]);
      }
      std::vector<std::size_t> order(static_cast<std::size_t>(n + 1));
      bool converged = false;
      while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
        ++result.iterations;
        result.history.push_back(result.x);
        result.value_history.push_back(result.value);

        double diameter = 0.0;
        for (std::size_t k = 1; k < pts.size(); ++k)
          diameter = std::max(diameter, ((pts[order[k]] - pts[best]).cwiseAbs().array() /
                                         pts[best].cwiseAbs().array().max(1e-300)).maxCoeff());
        const double spread = vals[worst] - vals[best];
        if ((std::isfinite(spread) && spread <= options.ftol) || diameter <= options.xtol) {
          converged = true;
          break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += pts[order[k]];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < vals[best]) {
          const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
          const double fe = eval(xe);
          if (fe < fr) {
            pts[worst] = xe;
            vals[worst] = fe;
          } else {
            pts[worst] = xr;
            vals[worst] = fr;
          }
          continue;
        }
        if (fr < vals[second]) {
          pts[worst] = xr;
          vals[worst] = fr;
          continue;
        }
        const bool outside = fr < vals[worst];
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                           : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[worst])) {
          pts[worst] = xc;
          vals[worst] = fc;
          continue;
        }
        for (std::size_t k = 1; k < order.size(); ++k) {
          const std::size_t idx = order[k];
          pts[idx] = pts[best] + 0.5 * (pts[idx] - pts[best]);
          vals[idx] = eval(pts[idx]);
        }
      }
      result.converged = converged;
      if (round > 0 && round_start_value - result.value <= options.ftol) break;
    }
  } catch (const Stop &) {
    result.converged = false;
  }
  return result;
}

}  // namespace scspec
