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

#include "dgp/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <string>

#include "dgp/instrumentation.hpp"

namespace dgp {

namespace {

void check_square_symmetric(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw DimensionMismatch("matrix is " + std::to_string(A.rows()) + "x" +
                            std::to_string(A.cols()) + ", expected square");
  }
  if (A.size() == 0) return;
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument("matrix is asymmetric beyond tolerance: " +
                                std::to_string(asym / scale));
  }
}

}  // namespace

double default_base_jitter(const Matrix& A) {
  if (A.rows() == 0) return 0.0;
  return 1e-8 * A.diagonal().mean();
}

SpdFactor cholesky_jittered(const Matrix& A, double base_jitter) {
  check_square_symmetric(A);
  const Index n = A.rows();
  note_allocation(n, n, "cholesky");
  if (n == 0) return SpdFactor{Matrix(0, 0), 0.0};

  // Work on the symmetrized matrix so that tolerated asymmetry cannot leak
  // into the factor.
  Matrix sym = 0.5 * (A + A.transpose());
  for (int level = -1; level <= 6; ++level) {
    const double jitter =
        level < 0 ? 0.0 : base_jitter * std::pow(10.0, static_cast<double>(level));
    Matrix shifted = sym;
    if (jitter != 0.0) shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) {
      SpdFactor factor{llt.matrixL(), jitter};
      if (factor.lower.diagonal().minCoeff() > 0.0 && factor.lower.allFinite()) {
        return factor;
      }
    }
    if (base_jitter == 0.0 && level >= 0) break;  // escalation cannot help
  }
  throw NonPositiveDefinite("cholesky failed for all jitter levels (base " +
                            std::to_string(base_jitter) + ")");
}

SpdFactor cholesky_jittered(const Matrix& A) {
  return cholesky_jittered(A, default_base_jitter(A));
}

Matrix solve_spd(const SpdFactor& factor, const Matrix& B) {
  if (factor.dim() != B.rows()) {
    throw DimensionMismatch("factor dim " + std::to_string(factor.dim()) +
                            " does not match rhs rows " + std::to_string(B.rows()));
  }
  note_allocation(B.rows(), B.cols(), "solve_spd");
  Matrix X = factor.lower.triangularView<Eigen::Lower>().solve(B);
  factor.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(X);
  return X;
}

Vector solve_spd(const SpdFactor& factor, const Vector& b) {
  return Vector(solve_spd(factor, Matrix(b)));
}

Matrix solve_lower(const SpdFactor& factor, const Matrix& B) {
  if (factor.dim() != B.rows()) {
    throw DimensionMismatch("factor dim " + std::to_string(factor.dim()) +
                            " does not match rhs rows " + std::to_string(B.rows()));
  }
  note_allocation(B.rows(), B.cols(), "solve_lower");
  return factor.lower.triangularView<Eigen::Lower>().solve(B);
}

double log_det(const SpdFactor& factor) {
  return 2.0 * factor.lower.diagonal().array().log().sum();
}

SymmetricSolve solve_symmetric_with_fallback(const Matrix& A, const Vector& b) {
  check_square_symmetric(A);
  if (A.rows() != b.size()) {
    throw DimensionMismatch("system is " + std::to_string(A.rows()) +
                            "-dimensional but rhs has length " +
                            std::to_string(b.size()));
  }
  if (A.rows() == 0) return SymmetricSolve{Vector(0), false};

  Matrix sym = 0.5 * (A + A.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    Vector x = llt.solve(b);
    const double residual = (sym * x - b).cwiseAbs().maxCoeff();
    const double scale = sym.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() +
                         b.cwiseAbs().maxCoeff();
    if (x.allFinite() && residual <= 1e-6 * std::max(scale, 1e-300)) {
      return SymmetricSolve{std::move(x), false};
    }
  }

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sym);
  SymmetricSolve out;
  out.solution = cod.solve(b);
  out.used_fallback = true;
  return out;
}

double gram_objective(const Matrix& gram, const Vector& coefficients) {
  if (gram.rows() != coefficients.size()) {
    throw DimensionMismatch("gram dim does not match coefficient length");
  }
  return coefficients.dot(gram * coefficients) -
         2.0 * coefficients.dot(gram.diagonal());
}

}  // namespace dgp
