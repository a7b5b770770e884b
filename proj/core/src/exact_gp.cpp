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

#include "dgp/exact_gp.hpp"

#include <cmath>
#include <numbers>

namespace dgp {

namespace {

void clamp_variances(GaussianPrediction& pred) {
  for (Index i = 0; i < pred.variance.size(); ++i) {
    if (pred.variance(i) < 0.0) {
      pred.variance(i) = 0.0;
      ++pred.clamped_variances;
    }
  }
  const Index n = pred.variance.size();
  if (n > 0 && pred.clamped_variances > 0.1 * static_cast<double>(n)) {
    throw ValidationError("clamped " + std::to_string(pred.clamped_variances) +
                          " of " + std::to_string(n) +
                          " predictive variances; model is numerically unsound");
  }
}

}  // namespace

ExactGpModel ExactGpModel::fit(const Dataset& data, const Hyperparameters& hp) {
  data.check_consistent();
  hp.validate(data.dim());
  ExactGpModel model;
  model.hp = hp;
  model.train_X = data.X;
  model.train_y = data.y;
  Matrix ky = kernel_matrix(hp.kernel, data.X, data.X);
  ky.diagonal().array() += hp.noise_variance;
  model.factor = cholesky_jittered(ky);
  model.alpha = solve_spd(model.factor, data.y);
  return model;
}

GaussianPrediction posterior(const ExactGpModel& model, const Matrix& Xstar,
                             bool full_cov) {
  if (Xstar.cols() != model.hp.dim()) {
    throw DimensionMismatch("test inputs have dimension " +
                            std::to_string(Xstar.cols()) + ", model expects " +
                            std::to_string(model.hp.dim()));
  }
  GaussianPrediction pred;
  const Index nt = Xstar.rows();
  if (nt == 0) {
    pred.mean.resize(0);
    pred.variance.resize(0);
    return pred;
  }
  Matrix kfs = kernel_matrix(model.hp.kernel, model.train_X, Xstar);  // n x nt
  pred.mean = kfs.transpose() * model.alpha;

  Matrix half = solve_lower(model.factor, kfs);  // L^{-1} K_fs
  if (full_cov) {
    Matrix cov = kernel_matrix(model.hp.kernel, Xstar, Xstar);
    cov.noalias() -= half.transpose() * half;
    pred.covariance = cov;
    pred.variance = cov.diagonal();
  } else {
    pred.variance = kernel_diagonal(model.hp.kernel, Xstar) -
                    half.colwise().squaredNorm().transpose();
  }
  clamp_variances(pred);
  if (pred.covariance) {
    for (Index i = 0; i < nt; ++i) (*pred.covariance)(i, i) = pred.variance(i);
  }
  return pred;
}

double log_marginal_likelihood(const ExactGpModel& model) {
  const double n = static_cast<double>(model.size());
  return -0.5 * (model.train_y.dot(model.alpha) + log_det(model.factor) +
                 n * std::log(2.0 * std::numbers::pi));
}

Vector lml_gradient(const ExactGpModel& model,
                    const std::vector<ParamSelector>& params) {
  const Index n = model.size();
  // One factorization, reused: the explicit inverse makes every trace term an
  // elementwise product.
  Matrix kinv = solve_spd(model.factor, Matrix::Identity(n, n));
  Vector grad(static_cast<Index>(params.size()));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix dk = kernel_matrix_grad(model.hp.kernel, model.train_X, model.train_X,
                                   params[p]);
    const double quad = model.alpha.dot(dk * model.alpha);
    const double trace = kinv.cwiseProduct(dk).sum();
    grad(static_cast<Index>(p)) = 0.5 * quad - 0.5 * trace;
  }
  return grad;
}

double lml_gradient(const ExactGpModel& model, const ParamSelector& param) {
  return lml_gradient(model, std::vector<ParamSelector>{param})(0);
}

}  // namespace dgp
