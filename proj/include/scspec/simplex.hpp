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

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace scspec {

struct SimplexOptions {
  double initial_fraction = 0.05;     // initial edge relative to each coordinate
  double zero_step = 1e-3;            // absolute edge for zero coordinates
  std::vector<double> initial_steps;  // explicit per-coordinate edges (overrides)
  double ftol = 1e-7;                 // spread of objective values over the simplex
  double xtol = 1e-12;                // relative simplex diameter
  int max_evaluations = 5000;
  int restarts = 3;                   // fresh simplex around the best point
  std::function<bool()> cancel;       // polled before every evaluation
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  bool cancelled = false;
  std::vector<Eigen::VectorXd> history;  // best point after each iteration
  std::vector<double> value_history;     // best value after each iteration
};

/// Nelder-Mead minimization with standard coefficients (1, 2, 1/2, 1/2).
/// Non-finite objective values are treated as +infinity. The best value is
/// non-increasing across iterations.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd &)> &objective,
                          const Eigen::VectorXd &start, const SimplexOptions &options = {});

}  // namespace scspec
