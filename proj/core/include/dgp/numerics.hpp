/*
 * Copyright 2026 The dgp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "dgp/types.hpp"

namespace dgp {

/// Lower-triangular Cholesky factor of A + jitter * I.
struct SpdFactor {
  Matrix lower;         // L, with L * L^T = A + jitter * I
  double jitter = 0.0;  // diagonal shift that made the factorization succeed

  Index dim() const { return lower.rows(); }
};

/// Default diagonal shift scale: 1e-8 times the mean diagonal of A.
double default_base_jitter(const Matrix& A);

/// Factors a symmetric matrix, escalating the diagonal shift on failure.
///
/// Tries jitter = 0 first, then base_jitter * 10^k for k = 0..6, and returns
/// the factor of A + jitter * I for the first level that succeeds.
///
/// Throws DimensionMismatch if A is not square, std::invalid_argument if A is
/// asymmetric beyond a 1e-12 relative tolerance, and NonPositiveDefinite if
/// every jitter level fails.
SpdFactor cholesky_jittered(const Matrix& A, double base_jitter);
SpdFactor cholesky_jittered(const Matrix& A);

/// Solves (L L^T) X = B by forward and back substitution.
Matrix solve_spd(const SpdFactor& factor, const Matrix& B);
Vector solve_spd(const SpdFactor& factor, const Vector& b);

/// Forward substitution only: returns L^{-1} B.
Matrix solve_lower(const SpdFactor& factor, const Matrix& B);

/// log det(A + jitter * I) = 2 * sum(log diag L).
double log_det(const SpdFactor& factor);

struct SymmetricSolve {
  Vector solution;
  bool used_fallback = false;  // minimum-norm least-squares route taken
};

/// Solves A x = b for symmetric A, tolerating singular systems.
///
/// First attempts a strict (zero-jitter) Cholesky solve and accepts it when
/// the residual satisfies |A x - b|_inf <= 1e-6 * (|A|_inf |x|_inf + |b|_inf).
/// Otherwise returns the minimum-norm least-squares solution computed with a
/// complete orthogonal decomposition; this route is deterministic and is the
/// one degenerate systems (duplicated experts, repeated grids) land on.
SymmetricSolve solve_symmetric_with_fallback(const Matrix& A, const Vector& b);

/// Value of the quadratic residual objective c^T A c - 2 c^T diag(A) that the
/// Gram systems A c = diag(A) minimize (constant term omitted).
double gram_objective(const Matrix& gram, const Vector& coefficients);

}  // namespace dgp
