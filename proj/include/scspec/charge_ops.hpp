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

#include <Eigen/Dense>

namespace scspec {

/// Single-junction operators in the Cooper-pair-number basis q = -n..n
/// (index q + n). Matrix elements are the plane-wave projections
/// <q'|f(phi)|q> = (1/2pi) int_{-pi}^{pi} exp(-i (q - q') phi) f(phi) dphi.
struct ChargeOperators {
  int max_charge = 0;
  Eigen::VectorXd charge;   // diagonal of q
  Eigen::MatrixXd cos_phi;  // (delta_{q',q+1} + delta_{q',q-1}) / 2
  Eigen::MatrixXcd sin_phi; // (delta_{q',q-1} - delta_{q',q+1}) / 2i
  Eigen::MatrixXcd phi;     // i (-1)^{q-q'} / (q - q'), zero diagonal
  Eigen::MatrixXd phi_sq;   // 2 (-1)^{q-q'} / (q - q')^2, pi^2/3 diagonal

  int dimension() const { return 2 * max_charge + 1; }
};

ChargeOperators charge_basis_operators(int max_charge);

/// Shared, lazily built operators; safe for concurrent readers.
const ChargeOperators &cached_charge_operators(int max_charge);

}  // namespace scspec
