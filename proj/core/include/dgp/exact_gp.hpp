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

/// Zero-mean exact GP regression model.
///
/// Fitting factors the noisy covariance Ky = K(X, X) + noise * I once and
/// caches alpha = Ky^{-1} y. A fitted model is immutable; changing the
/// hyperparameters means fitting a new model, so the cost profile of every
/// query is explicit.
struct ExactGpModel {
  Hyperparameters hp;
  Matrix train_X;
  Vector train_y;
  SpdFactor factor;  // of K(X, X) + noise * I
  Vector alpha;      // (K(X, X) + noise * I)^{-1} y

  Index size() const { return train_X.rows(); }

  static ExactGpModel fit(const Dataset& data, const Hyperparameters& hp);
};

/// Posterior mean and variance at the test inputs. Negative variances from
/// floating cancellation are clamped to zero and counted; more than 10% of
/// test points clamped fails validation.
GaussianPrediction posterior(const ExactGpModel& model, const Matrix& Xstar,
                             bool full_cov = false);

/// -0.5 * (y^T Ky^{-1} y + log det Ky + n log 2 pi)
double log_marginal_likelihood(const ExactGpModel& model);

/// d LML / d theta = 0.5 y^T Ky^{-1} (dKy/dtheta) Ky^{-1} y
///                   - 0.5 tr(Ky^{-1} dKy/dtheta)
double lml_gradient(const ExactGpModel& model, const ParamSelector& param);

/// Gradient for several parameters with the explicit inverse formed once.
Vector lml_gradient(const ExactGpModel& model,
                    const std::vector<ParamSelector>& params);

}  // namespace dgp
