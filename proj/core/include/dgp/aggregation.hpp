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

#include "dgp/exact_gp.hpp"
#include "dgp/experts.hpp"
#include "dgp/svgp.hpp"
#include "dgp/types.hpp"

namespace dgp {

/// Experts fitted on the shards of one partition, all sharing the same
/// hyperparameters. Expert fits run in parallel; a built ensemble is
/// immutable and safe to query concurrently.
struct ExactEnsemble {
  Hyperparameters hp;
  Dataset data;
  Partition partition;
  CentralSubset central;
  std::vector<ExactGpModel> experts;

  int expert_count() const { return static_cast<int>(experts.size()); }
};

/// SVGP experts additionally share the inducing inputs Z carried by hp.
struct SvgpEnsemble {
  Hyperparameters hp;
  Dataset data;
  Partition partition;
  CentralSubset central;
  std::vector<SvgpModel> experts;

  int expert_count() const { return static_cast<int>(experts.size()); }
};

ExactEnsemble build_exact_ensemble(const Dataset& data, const Partition& partition,
                                   const Hyperparameters& hp,
                                   unsigned long central_seed);
SvgpEnsemble build_svgp_ensemble(const Dataset& data, const Partition& partition,
                                 const Hyperparameters& hp,
                                 unsigned long central_seed);

enum class PoeRule { PoE, GPoE, BCM, RBCM };

/// Precision-weighted expert fusion.
///
/// Joint precision: sum_i beta_i / s_i^2, plus the prior correction
/// (1 - sum beta_i) / s_prior^2 for the committee rules (BCM, rBCM) only;
/// s_prior^2 = k(x, x) + noise. Weights: 1 for PoE and BCM, 1/M for gPoE,
/// 0.5 (log s_prior^2 - log s_i^2) for rBCM. Non-positive joint precisions
/// (possible for rBCM) are clamped to the prior precision and counted.
GaussianPrediction aggregate_poe_family(const ExactEnsemble& ensemble,
                                        const Matrix& Xstar, PoeRule rule);
GaussianPrediction aggregate_poe_family(const SvgpEnsemble& ensemble,
                                        const Matrix& Xstar, PoeRule rule);

/// Generalized robust Bayesian committee machine: expert 1's shard is the
/// communication set; every other expert is refitted on its shard augmented
/// with the communication set, and the fused prediction corrects for the
/// repeated communication expert.
GaussianPrediction aggregate_grbcm(const ExactEnsemble& ensemble, const Matrix& Xstar);
GaussianPrediction aggregate_grbcm(const SvgpEnsemble& ensemble, const Matrix& Xstar);

/// Nested pointwise aggregation: per test point, solves the M x M system of
/// covariances between expert predictors. Requires exact-GP experts (the
/// cross covariances are defined through the shards' noisy kernel matrices).
/// The per-point system is factored with the jitter policy; numerically
/// singular systems (e.g. test points far from all data) fall back to the
/// minimum-norm solve. The returned variance includes the observation noise.
GaussianPrediction aggregate_npae(const ExactEnsemble& ensemble, const Matrix& Xstar);

/// Weights solved from the Gram system A beta = diag(A).
struct WeightSolution {
  Vector beta;
  Matrix gram;
  bool fallback_used = false;
};

/// Optimal aggregation weights for shared-inducing SVGP experts. The Gram
/// entry for experts (i, j) is noise^{-1} alpha_i^T Mc alpha_j where
/// Mc = Kuu + noise^{-1} Kuc Kcu is built from the central subset.
WeightSolution optimal_weights_svgp(const SvgpEnsemble& ensemble);

/// Optimally weighted SVGP fusion:
///   mean = sum_i beta_i * noise^{-1} Ksu M_i^{-1} Kuf_i y_i
///   var  = sum_i beta_i^2 * Ksu M_i^{-1} Kus
/// (the variance deliberately has no prior-residual term).
GaussianPrediction aggregate_opt_svgp(const SvgpEnsemble& ensemble,
                                      const WeightSolution& weights,
                                      const Matrix& Xstar);

/// Optimal weights for exact-GP experts: Gram entry
/// alpha_i^T [K(Xi, Xj) + K(Xi, Xc) K(Xc, Xj)] alpha_j.
WeightSolution optimal_weights_exact(const ExactEnsemble& ensemble);

/// Optimally weighted exact-GP fusion:
///   mean = sum_i beta_i Ks_i Ky_i^{-1} y_i,
///   var  = sum_i beta_i^2 Ks_i Ky_i^{-1} K_is.
GaussianPrediction aggregate_opt_exact(const ExactEnsemble& ensemble,
                                       const WeightSolution& weights,
                                       const Matrix& Xstar);

/// Rows of the training inputs picked by the central subset.
Matrix central_inputs(const Dataset& data, const CentralSubset& central);

}  // namespace dgp
