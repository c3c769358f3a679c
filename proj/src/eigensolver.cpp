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

#include "scspec/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/CholmodSupport>
#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include "scspec/error.hpp"

namespace scspec {

EigenPairs dense_symmetric_eigen(const Eigen::MatrixXd &a, int count, bool vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw InvalidArgument("eigen solve needs a square matrix");
  if (count < 0 || count > n) count = n;
  EigenPairs out;
  if (n == 0 || count == 0) return out;
  Eigen::MatrixXd work = a;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, vectors ? count : 1);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const char range = count == n ? 'A' : 'I';
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', range, 'U', n, work.data(), n, 0.0,
                     0.0, 1, count, 0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0) throw NumericalError("dsyevr failed with info " + std::to_string(info));
  out.values = w.head(found);
  if (vectors) out.vectors = z.leftCols(found);
  return out;
}

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower>;
using Llt = Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>;

SparseMatrix shifted(const SparseMatrix &a, double sigma) {
  SparseMatrix identity(a.rows(), a.cols());
  identity.setIdentity();
  return a - sigma * identity;
}

// Number of negative pivots of A - sigma I, i.e. eigenvalues below sigma.
// Returns -1 when the factorization fails.
long negative_count(const Ldlt &ldlt) {
  if (ldlt.info() != Eigen::Success) return -1;
  const Eigen::VectorXd d = ldlt.vectorD();
  if (!d.allFinite()) return -1;
  long neg = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) return -1;
    neg += d(i) < 0.0 ? 1 : 0;
  }
  return neg;
}

Eigen::VectorXd start_vector(Eigen::Index n) {
  std::mt19937_64 engine(0x5eedULL);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
  return v.normalized();
}

// Full-reorthogonalized Lanczos on a linear operator; returns the Ritz
// values/vectors of the converged top `count` eigenvalues of the operator
// (largest first), or nothing when max_steps is exhausted.
template <typename Apply>
bool lanczos_top(Eigen::Index n, int count, int max_steps, double tol, Apply apply,
                 Eigen::VectorXd &ritz, Eigen::MatrixXd &ritz_vectors, int &steps) {
  const int m_max = static_cast<int>(std::min<Eigen::Index>(n, max_steps));
  Eigen::MatrixXd basis(n, m_max);
  std::vector<double> alpha, beta;
  basis.col(0) = start_vector(n);
  Eigen::VectorXd w(n);
  for (int j = 0; j < m_max; ++j) {
    w = apply(basis.col(j));
    const double a = basis.col(j).dot(w);
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd h = basis.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis.leftCols(j + 1) * h;
    }
    const double b = w.norm();
    const int m = j + 1;
    const bool last = (m == m_max) || b == 0.0;
    if (m >= count && (m % 8 == 0 || last)) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int k = 0; k < m; ++k) {
        t(k, k) = alpha[static_cast<std::size_t>(k)];
        if (k + 1 < m) t(k, k + 1) = t(k + 1, k) = beta[static_cast<std::size_t>(k)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      bool converged = true;
      for (int k = 0; k < count; ++k) {
        const int idx = m - 1 - k;
        const double theta = es.eigenvalues()(idx);
        const double resid = std::abs(b * es.eigenvectors()(m - 1, idx));
        if (!(resid <= tol * std::abs(theta))) {
          converged = false;
          break;
        }
      }
      if (converged || b == 0.0 || last) {
        ritz.resize(count);
        ritz_vectors.resize(n, count);
        for (int k = 0; k < count; ++k) {
          const int idx = m - 1 - k;
          ritz(k) = es.eigenvalues()(idx);
          ritz_vectors.col(k) = basis.leftCols(m) * es.eigenvectors().col(idx);
        }
        steps = m;
        return converged || b == 0.0;
      }
    }
    if (last) break;
    beta.push_back(b);
    basis.col(j + 1) = w / b;
  }
  steps = m_max;
  return false;
}

}  // namespace

EigenPairs lowest_eigenpairs(const SparseMatrix &a, int count, EigenMethod method,
                             const LanczosOptions &options, LanczosReport *report) {
  const Eigen::Index n = a.rows();
  if (a.rows() != a.cols()) throw InvalidArgument("eigen solve needs a square matrix");
  if (count < 1 || count > n) throw InvalidArgument("requested eigenpair count out of range");
  LanczosReport local;
  LanczosReport &rep = report ? *report : local;
  rep = LanczosReport{};

  auto dense = [&]() {
    rep.used_dense = true;
    return dense_symmetric_eigen(Eigen::MatrixXd(a), count, true);
  };
  if (method == EigenMethod::Dense ||
      (method == EigenMethod::Auto && (n < options.dense_below || 4 * count > n)))
    return dense();

  // Coarse estimate of the bottom of the spectrum from a short plain Lanczos run.
  Eigen::VectorXd ritz;
  Eigen::MatrixXd ritz_vectors;
  int steps = 0;
  {
    const int probe = static_cast<int>(std::min<Eigen::Index>(n, 40));
    lanczos_top(n, 2, probe, 0.0, [&](const Eigen::VectorXd &x) -> Eigen::VectorXd { return -(a * x); },
                ritz, ritz_vectors, steps);
  }
  const double lowest_estimate = -ritz(0);
  const double scale = std::max(1.0, std::abs(lowest_estimate));
  double offset = std::max(0.1 * std::abs(ritz(0) - ritz(1)), 1e-6 * scale);

  // A - sigma I is positive definite exactly when sigma lies below the spectrum.
  Llt llt;
  llt.cholmod().print = 0;
  llt.analyzePattern(shifted(a, lowest_estimate));
  double sigma = lowest_estimate - offset;
  bool factored = false;
  for (int attempt = 0; attempt < 12; ++attempt) {
    llt.factorize(shifted(a, sigma));
    if (llt.info() == Eigen::Success) {
      factored = true;
      break;
    }
    offset *= 4.0;
    sigma = lowest_estimate - offset;
  }
  if (!factored) return dense();
  rep.shift = sigma;

  Eigen::VectorXd theta;
  if (!lanczos_top(n, count, options.max_steps, options.tolerance,
                   [&](const Eigen::VectorXd &x) -> Eigen::VectorXd { return llt.solve(x); },
                   theta, ritz_vectors, steps))
    return dense();
  rep.steps = steps;

  EigenPairs out;
  out.values.resize(count);
  out.vectors.resize(n, count);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x = ritz_vectors.col(k).normalized();
    const Eigen::VectorXd ax = a * x;
    out.values(k) = x.dot(ax);
    rep.max_residual = std::max(rep.max_residual, (ax - out.values(k) * x).norm());
    out.vectors.col(k) = x;
  }
  // Ritz values of the inverted operator come largest first, i.e. already
  // ascending in the original spectrum; keep the order robust anyway.
  std::vector<int> order(count);
  for (int k = 0; k < count; ++k) order[static_cast<std::size_t>(k)] = k;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return out.values(x) < out.values(y); });
  EigenPairs sorted;
  sorted.values.resize(count);
  sorted.vectors.resize(n, count);
  for (int k = 0; k < count; ++k) {
    sorted.values(k) = out.values(order[static_cast<std::size_t>(k)]);
    sorted.vectors.col(k) = out.vectors.col(order[static_cast<std::size_t>(k)]);
  }

  if (options.verify_inertia) {
    const double top = sorted.values(count - 1);
    const double probe = top + std::max(1e-9 * std::max(1.0, std::abs(top)), 10.0 * rep.max_residual);
    Ldlt ldlt(shifted(a, probe));
    if (negative_count(ldlt) != count) return dense();
  }
  return sorted;
}

}  // namespace scspec
