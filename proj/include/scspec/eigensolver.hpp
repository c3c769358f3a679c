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
#include <Eigen/Sparse>

namespace scspec {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, empty when not requested
};

/// Lowest `count` eigenpairs of a dense symmetric matrix (LAPACK dsyevr).
/// count < 0 requests the full spectrum.
EigenPairs dense_symmetric_eigen(const Eigen::MatrixXd &a, int count = -1, bool vectors = true);

enum class EigenMethod { Auto, Dense, ShiftInvertLanczos };

struct LanczosOptions {
  double tolerance = 1e-12;      // relative Ritz residual in the inverted operator
  int max_steps = 800;
  int dense_below = 1200;        // Auto uses the dense solver below this size
  bool verify_inertia = true;    // Sylvester count check for missed eigenvalues
};

struct LanczosReport {
  int steps = 0;
  double shift = 0.0;
  bool used_dense = false;
  double max_residual = 0.0;  // ||A x - lambda x|| over returned pairs
};

/// Lowest `count` eigenpairs of a sparse symmetric matrix by shift-invert
/// Lanczos with full reorthogonalization. The shift is placed below the
/// spectrum (the shifted matrix must admit a Cholesky factorization) and the
/// result is validated by an LDL^T inertia count; any failure falls back to
/// the dense solver.
EigenPairs lowest_eigenpairs(const SparseMatrix &a, int count, EigenMethod method = EigenMethod::Auto,
                             const LanczosOptions &options = {}, LanczosReport *report = nullptr);

}  // namespace scspec
