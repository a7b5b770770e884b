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

namespace dgp {

/// Collapsed sparse variational GP with m inducing inputs Z.
///
/// All sufficient statistics are m-dimensional:
///   M = Kuu + noise^{-1} Kuf Kfu,   alpha = M^{-1} Kuf y.
/// The optimal variational distribution, the collapsed ELBO, and the
/// predictive distribution are all expressed through alpha and the factors of
/// M and Kuu, so no n x n matrix is ever formed.
struct SvgpModel {
  Hyperparameters hp;  // inducing_inputs required
  Matrix train_X;
  Vector train_y;
  Matrix Kuu;            // m x m
  SpdFactor kuu_factor;  // jittered factor of Kuu
  Matrix Kuf;            // m x n cross-kernel
  SpdFactor m_factor;    // factor of M
  Vector alpha;          // M^{-1} Kuf y

  Index size() const { return train_X.rows(); }
  Index inducing_count() const { return Kuu.rows(); }

  static SvgpModel fit(const Dataset& data, const Hyperparameters& hp);
};

/// Optimal variational distribution over the inducing variables:
/// mean  = noise^{-1} Kuu M^{-1} Kuf y, covariance = Kuu M^{-1} Kuu.
struct VariationalDistribution {
  Vector mean;
  Matrix covariance;
};
VariationalDistribution optimal_variational(const SvgpModel& model);

/// Collapsed ELBO
///   log N(y | 0, Q + noise I) - 0.5 noise^{-1} tr(Kff - Q),
///   Q = Kfu Kuu^{-1} Kuf,
/// evaluated through the m x m inversion and determinant identities. Only
/// diag(Kff) is ever materialized for the trace.
double elbo(const SvgpModel& model);

/// Which raw parameters elbo_gradient differentiates, in order: lengthscales,
/// signal variance, noise variance, then inducing coordinates (row-major)
/// when enabled.
struct SvgpParamSet {
  bool lengthscales = true;
  bool signal_variance = true;
  bool noise_variance = true;
  bool inducing_inputs = false;

  std::vector<std::string> names(const SvgpModel& model) const;
};

/// Central finite differences of the ELBO with a relative step per parameter
/// (default 1e-5). The step for an inducing coordinate z is
/// rel_step * (|z| + 1) since z may be zero.
Vector elbo_gradient(const SvgpModel& model, const SvgpParamSet& params,
                     double rel_step = 1e-5);

/// Predictive distribution:
///   mean = noise^{-1} Ksu M^{-1} Kuf y
///   var  = k(s, s) - Ksu (Kuu^{-1} - M^{-1}) Kus
/// Negative variances are clamped to zero and counted.
GaussianPrediction predict(const SvgpModel& model, const Matrix& Xstar,
                           bool full_cov = false);

}  // namespace dgp
