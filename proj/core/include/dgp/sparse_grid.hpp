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

#include "dgp/kernels.hpp"
#include "dgp/numerics.hpp"
#include "dgp/types.hpp"

#include <utility>

namespace dgp {

/// Per-dimension refinement levels of one anisotropic full grid.
struct MultiIndex {
  std::vector<int> levels;  // every component >= 1

  int dim() const { return static_cast<int>(levels.size()); }
  int sum() const;
  bool operator==(const MultiIndex& other) const { return levels == other.levels; }
};

/// Axis-aligned box, one (lower, upper) pair per dimension.
using Box = std::vector<std::pair<double, double>>;

Box unit_box(int d);
Box symmetric_box(int d, double half_width);

/// All level vectors with components >= 1 and eta <= |l|_1 <= eta + d - 1,
/// ordered by level sum and lexicographically within each sum.
std::vector<MultiIndex> enumerate_indices(int eta, int d);

/// Number of indices enumerate_indices(eta, d) returns:
/// sum_{s=eta}^{eta+d-1} C(s-1, d-1).
long long index_count(int eta, int d);

/// Exact binomial coefficient in integer arithmetic.
long long binomial(int n, int k);

/// Dyadic interior points of the anisotropic grid: the Cartesian product over
/// dimensions of { i / 2^{l_j} : i = 1..2^{l_j} - 1 }, affinely mapped to the
/// box. Rows are ordered with the last dimension varying fastest. Throws
/// OverflowGuard when the grid would exceed 1e7 points.
Matrix grid_points(const MultiIndex& index, const Box& box);

long long grid_point_count(const MultiIndex& index);

/// Combination-technique coefficient (-1)^{eta+d-1-|l|_1} C(d-1, |l|_1 - eta).
/// Throws IndexOutOfRange when the index is outside the enumerated set.
long long ct_coefficient(const MultiIndex& index, int eta, int d);

/// One summand of the combination formula: the grid, its binomial weight, and
/// the sparse-regression statistics computed on it.
struct CombinationTerm {
  MultiIndex index;
  Matrix grid;                 // grid_point_count x d inducing inputs
  long long ct_coefficient = 0;
  Vector alpha;                // M^{-1} K_{uf} y
  SpdFactor factor;            // of M = K_{uu} + noise^{-1} K_{uf} K_{fu}
};

/// Solved combination coefficients plus the Gram system that produced them.
struct OptiComSolution {
  Vector coefficients;  // c, length b
  Matrix gram;          // b x b matrix of regularized least-squares products
  std::vector<CombinationTerm> terms;
  bool used_fallback = false;
};

/// Optimized combination coefficients.
///
/// For every enumerated grid the partial solution's kernel weights alpha are
/// computed; the Gram matrix of pairwise regularized least-squares scalar
/// products A[i,j] = noise^{-1} alpha_i^T (K_{u_i u_j} + noise^{-1} K_{u_i f}
/// K_{f u_j}) alpha_j is assembled (term statistics and Gram cells in
/// parallel, each cell written once); the coefficients solve A c = diag(A)
/// with the minimum-norm fallback for singular systems.
OptiComSolution opticom_coefficients(const Dataset& data, const Hyperparameters& hp,
                                     int eta, int d, const Box& box);

/// Same solve over an explicit index list (duplicate indices allowed; used to
/// exercise the degenerate-system fallback).
OptiComSolution opticom_coefficients_for_indices(const Dataset& data,
                                                 const Hyperparameters& hp,
                                                 const std::vector<MultiIndex>& indices,
                                                 int eta, int d, const Box& box);

/// Per-grid statistics only (no Gram system, no solve); enough for the plain
/// combination technique.
std::vector<CombinationTerm> combination_terms(const Dataset& data,
                                               const Hyperparameters& hp, int eta,
                                               int d, const Box& box);

/// Combined posterior that uses the binomial coefficients in both the mean
/// and the covariance.
GaussianPrediction combination_posterior(const std::vector<CombinationTerm>& terms,
                                         const Hyperparameters& hp,
                                         const Matrix& Xstar, bool full_cov = false);

/// Which coefficients weight the posterior-mean terms.
enum class MeanWeights {
  Optimized,  // solved coefficients c
  Binomial,   // plain combination-technique coefficients
};

/// Combined posterior over the test inputs. The mean combines per-grid
/// predictors with the selected coefficients; the covariance always uses the
/// binomial coefficients. Variances are clamped at zero and counted.
GaussianPrediction opticom_posterior(const OptiComSolution& solution,
                                     const Hyperparameters& hp, const Matrix& Xstar,
                                     MeanWeights mean_weights = MeanWeights::Optimized,
                                     bool full_cov = false);

/// Convenience overload that solves for the coefficients first.
GaussianPrediction opticom_posterior(const Dataset& data, const Hyperparameters& hp,
                                     int eta, int d, const Box& box,
                                     const Matrix& Xstar,
                                     MeanWeights mean_weights = MeanWeights::Optimized,
                                     bool full_cov = false);

}  // namespace dgp
