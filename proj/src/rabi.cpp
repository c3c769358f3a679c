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

#include <cmath>

#include "scspec/error.hpp"
#include "scspec/hamiltonian.hpp"

namespace scspec {

void RabiParams::validate() const {
  for (double v : {g, delta, omega_r, eps_slope, I0, A_minus, A_plus})
    if (!std::isfinite(v)) throw InvalidArgument("Rabi parameters must be finite", "rabi");
  if (omega_r <= 0.0) throw InvalidArgument("resonator frequency must be positive", "omega_r");
  if (delta < 0.0) throw InvalidArgument("qubit gap must be non-negative", "delta");
}

double RabiParams::resonator(double I) const {
  const double d = I - I0;
  return d > 0.0 ? omega_r * (1.0 + A_plus * d) : omega_r * (1.0 - A_minus * d);
}

Eigen::MatrixXd rabi_hamiltonian(double g, double delta, double omega_r, double eps, int fock) {
  if (fock < 2) throw InvalidArgument("Fock truncation must be >= 2", "fock");
  const int n = 2 * fock;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < 2; ++s) {
    const double sz = s == 0 ? 1.0 : -1.0;
    for (int k = 0; k < fock; ++k) {
      const int i = s * fock + k;
      h(i, i) = 0.5 * eps * sz + omega_r * k;
      h(i, (1 - s) * fock + k) = 0.5 * delta;
      if (k + 1 < fock) {
        const double c = g * sz * std::sqrt(static_cast<double>(k + 1));
        h(i, i + 1) = c;
        h(i + 1, i) = c;
      }
    }
  }
  return h;
}

Eigen::MatrixXd rabi_hamiltonian(const RabiParams &params, double I, int fock) {
  return rabi_hamiltonian(params.g, params.delta, params.resonator(I), params.eps(I), fock);
}

Eigen::VectorXd rabi_levels(const RabiParams &params, double I, int fock, int levels) {
  const Eigen::MatrixXd h = rabi_hamiltonian(params, I, fock);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Rabi eigensolver failed");
  if (levels < 0 || levels > es.eigenvalues().size()) return es.eigenvalues();
  return es.eigenvalues().head(levels);
}

}  // namespace scspec
