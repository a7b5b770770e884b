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

#include "dgp/kernels.hpp"

#include <cmath>

#include "dgp/instrumentation.hpp"

namespace dgp {

namespace {

const double kSqrt3 = std::sqrt(3.0);

void check_inputs(const KernelSpec& spec, const Matrix& X, const Matrix& Y) {
  if (X.cols() != spec.dim() || Y.cols() != spec.dim()) {
    throw DimensionMismatch("kernel expects " + std::to_string(spec.dim()) +
                            "-dimensional inputs, got " + std::to_string(X.cols()) +
                            " and " + std::to_string(Y.cols()));
  }
}

/// Squared distances scaled by the per-dimension lengthscales.
Matrix scaled_sq_dist(const KernelSpec& spec, const Matrix& X, const Matrix& Y) {
  Matrix Xs = X * spec.lengthscales.cwiseInverse().asDiagonal();
  Matrix Ys = Y * spec.lengthscales.cwiseInverse().asDiagonal();
  Matrix d2 = (-2.0 * Xs * Ys.transpose());
  d2.colwise() += Xs.rowwise().squaredNorm();
  d2.rowwise() += Ys.rowwise().squaredNorm().transpose();
  return d2.cwiseMax(0.0);
}

bool same_point_set(const Matrix& X, const Matrix& Y) {
  return X.rows() == Y.rows() && X.cols() == Y.cols() && X == Y;
}

}  // namespace

std::string kernel_family_name(KernelFamily family) {
  return family == KernelFamily::RBF ? "rbf" : "matern32";
}

KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "rbf") return KernelFamily::RBF;
  if (name == "matern32") return KernelFamily::Matern32;
  throw ConfigError("unknown kernel family: " + name);
}

void KernelSpec::validate() const {
  if (lengthscales.size() == 0) throw ConfigError("kernel has no lengthscales");
  if ((lengthscales.array() <= 0.0).any()) {
    throw ConfigError("lengthscales must be strictly positive");
  }
  if (!(signal_variance > 0.0)) {
    throw ConfigError("signal_variance must be strictly positive");
  }
}

KernelSpec KernelSpec::rbf(const Vector& lengthscales, double signal_variance) {
  KernelSpec spec{KernelFamily::RBF, lengthscales, signal_variance};
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::rbf(double lengthscale, Index dim, double signal_variance) {
  return rbf(Vector::Constant(dim, lengthscale), signal_variance);
}

KernelSpec KernelSpec::matern32(const Vector& lengthscales, double signal_variance) {
  KernelSpec spec{KernelFamily::Matern32, lengthscales, signal_variance};
  spec.validate();
  return spec;
}

void Hyperparameters::validate() const {
  kernel.validate();
  if (!(noise_variance > 0.0)) {
    throw ConfigError("noise_variance must be strictly positive");
  }
  if (inducing_inputs && inducing_inputs->cols() != kernel.dim()) {
    throw DimensionMismatch("inducing inputs have dimension " +
                            std::to_string(inducing_inputs->cols()) +
                            ", kernel expects " + std::to_string(kernel.dim()));
  }
}

void Hyperparameters::validate(Index data_dim) const {
  validate();
  if (kernel.dim() != data_dim) {
    throw DimensionMismatch("kernel dimension " + std::to_string(kernel.dim()) +
                            " does not match data dimension " +
                            std::to_string(data_dim));
  }
}

std::string ParamSelector::name() const {
  switch (kind) {
    case Kind::Lengthscale:
      return "lengthscale_" + std::to_string(index);
    case Kind::SignalVariance:
      return "signal_variance";
    case Kind::NoiseVariance:
      return "noise_variance";
  }
  return "?";
}

std::vector<ParamSelector> all_param_selectors(Index dim) {
  std::vector<ParamSelector> out;
  for (Index i = 0; i < dim; ++i) out.push_back(ParamSelector::lengthscale(static_cast<int>(i)));
  out.push_back(ParamSelector::signal_variance());
  out.push_back(ParamSelector::noise_variance());
  return out;
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& X, const Matrix& Y) {
  check_inputs(spec, X, Y);
  note_allocation(X.rows(), Y.rows(), "kernel_matrix");
  Matrix d2 = scaled_sq_dist(spec, X, Y);
  switch (spec.family) {
    case KernelFamily::RBF:
      return spec.signal_variance * (-0.5 * d2.array()).exp().matrix();
    case KernelFamily::Matern32: {
      Matrix r = d2.array().sqrt().matrix();
      return spec.signal_variance *
             ((1.0 + kSqrt3 * r.array()) * (-kSqrt3 * r.array()).exp()).matrix();
    }
  }
  throw Error("unreachable kernel family");
}

Vector kernel_diagonal(const KernelSpec& spec, const Matrix& X) {
  if (X.cols() != spec.dim()) {
    throw DimensionMismatch("kernel_diagonal dimension mismatch");
  }
  // Both families are stationary: k(x, x) = signal variance.
  return Vector::Constant(X.rows(), spec.signal_variance);
}

Matrix kernel_matrix_grad(const KernelSpec& spec, const Matrix& X, const Matrix& Y,
                          const ParamSelector& param) {
  check_inputs(spec, X, Y);
  switch (param.kind) {
    case ParamSelector::Kind::NoiseVariance: {
      if (same_point_set(X, Y)) {
        return Matrix::Identity(X.rows(), Y.rows());
      }
      return Matrix::Zero(X.rows(), Y.rows());
    }
    case ParamSelector::Kind::SignalVariance:
      // Every stationary family here is linear in the signal variance.
      return kernel_matrix(spec, X, Y) / spec.signal_variance;
    case ParamSelector::Kind::Lengthscale: {
      if (param.index < 0 || param.index >= spec.dim()) {
        throw UnsupportedParam("lengthscale index " + std::to_string(param.index) +
                               " out of range");
      }
      if (spec.family != KernelFamily::RBF) {
        throw UnsupportedParam(
            "analytic lengthscale gradients are only available for the RBF "
            "family");
      }
      // d k / d l_i = k * (x_i - y_i)^2 / l_i^3
      const double l = spec.lengthscales(param.index);
      Matrix diff = X.col(param.index).replicate(1, Y.rows());
      diff.rowwise() -= Y.col(param.index).transpose();
      Matrix k = kernel_matrix(spec, X, Y);
      return (k.array() * diff.array().square() / (l * l * l)).matrix();
    }
  }
  throw Error("unreachable param kind");
}

}  // namespace dgp
