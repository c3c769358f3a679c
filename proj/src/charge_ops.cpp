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

#include "scspec/charge_ops.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "scspec/error.hpp"

namespace scspec {

ChargeOperators charge_basis_operators(int max_charge) {
  if (max_charge < 1) throw InvalidArgument("charge truncation must be >= 1", "n");
  const int dim = 2 * max_charge + 1;
  const std::complex<double> i(0.0, 1.0);
  ChargeOperators ops;
  ops.max_charge = max_charge;
  ops.charge.resize(dim);
  ops.cos_phi = Eigen::MatrixXd::Zero(dim, dim);
  ops.sin_phi = Eigen::MatrixXcd::Zero(dim, dim);
  ops.phi = Eigen::MatrixXcd::Zero(dim, dim);
  ops.phi_sq = Eigen::MatrixXd::Zero(dim, dim);
  for (int row = 0; row < dim; ++row) {
    const int qp = row - max_charge;
    ops.charge(row) = qp;
    for (int col = 0; col < dim; ++col) {
      const int q = col - max_charge;
      const int d = q - qp;
      if (d == -1) {
        ops.cos_phi(row, col) = 0.5;
        ops.sin_phi(row, col) = -0.5 / i;
      } else if (d == 1) {
        ops.cos_phi(row, col) = 0.5;
        ops.sin_phi(row, col) = 0.5 / i;
      }
      if (d == 0) {
        ops.phi_sq(row, col) = std::numbers::pi * std::numbers::pi / 3.0;
      } else {
        const double sign = (d % 2 == 0) ? 1.0 : -1.0;
        ops.phi(row, col) = i * sign / static_cast<double>(d);
        ops.phi_sq(row, col) = 2.0 * sign / static_cast<double>(d * d);
      }
    }
  }
  return ops;
}

const ChargeOperators &cached_charge_operators(int max_charge) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const ChargeOperators>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto &slot = cache[max_charge];
  if (!slot) slot = std::make_unique<const ChargeOperators>(charge_basis_operators(max_charge));
  return *slot;
}

}  // namespace scspec
