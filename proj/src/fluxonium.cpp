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
#include <complex>

#include "scspec/error.hpp"
#include "scspec/hamiltonian.hpp"

namespace scspec {

void FluxoniumParams::validate() const {
  if (!(EJ >= 0.0 && EC > 0.0 && EL > 0.0) || !std::isfinite(EJ))
    throw InvalidArgument("fluxonium needs EJ >= 0 and EC, EL > 0", "fluxonium");
}

Eigen::MatrixXcd displacement_matrix(double x, int size) {
  if (size < 1) throw InvalidArgument("basis size must be positive", "n_basis");
  const double y = x * x;
  const double gauss = std::exp(-0.5 * y);
  Eigen::MatrixXcd out(size, size);
  const std::complex<double> phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int lo = 0; lo < size; ++lo) {
    for (int hi = lo; hi < size; ++hi) {
      const int d = hi - lo;
      // Generalized Laguerre L_lo^(d)(y) by upward recurrence.
      double l_prev = 1.0, l_cur = 1.0 + d - y;
      double lag = 1.0;
      if (lo == 1) lag = l_cur;
      for (int k = 1; k < lo; ++k) {
        const double l_next = ((2.0 * k + 1.0 + d - y) * l_cur - (k + d) * l_prev) / (k + 1.0);
        l_prev = l_cur;
        l_cur = l_next;
      }
      if (lo >= 1) lag = l_cur;
      double mag;
      if (x == 0.0) {
        mag = d == 0 ? 1.0 : 0.0;
      } else {
        const double log_pref = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) + d * std::log(std::abs(x));
        mag = std::exp(log_pref) * gauss * lag;
        if (x < 0.0 && d % 2 == 1) mag = -mag;
      }
      const std::complex<double> v = phases[d % 4] * mag;
      out(hi, lo) = v;
      out(lo, hi) = v;
    }
  }
  return out;
}

Eigen::MatrixXd fluxonium_hamiltonian(const FluxoniumParams &params, double phi_ex, int n_basis) {
  params.validate();
  if (n_basis < 2) throw InvalidArgument("fluxonium basis must be >= 2", "n_basis");
  const double phi_zpf = std::pow(2.0 * params.EC / params.EL, 0.25);
  const double omega_p = std::sqrt(8.0 * params.EC * params.EL);
  const Eigen::MatrixXcd d = displacement_matrix(phi_zpf, n_basis);
  Eigen::MatrixXd h = -params.EJ * (std::cos(phi_ex) * d.real() + std::sin(phi_ex) * d.imag());
  for (int n = 0; n < n_basis; ++n) h(n, n) += omega_p * (n + 0.5);
  return h;
}

Eigen::VectorXd fluxonium_levels(const FluxoniumParams &params, double phi_ex, int n_basis, int levels) {
  const Eigen::MatrixXd h = fluxonium_hamiltonian(params, phi_ex, n_basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("fluxonium eigensolver failed");
  if (levels < 0 || levels > es.eigenvalues().size()) return es.eigenvalues();
  return es.eigenvalues().head(levels);
}

}  // namespace scspec
