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

enum class KernelFamily { RBF, Matern32 };

std::string kernel_family_name(KernelFamily family);
KernelFamily kernel_family_from_name(const std::string& name);

/// Stationary covariance with one lengthscale per input dimension.
///
/// RBF:       k(x, x') = sf2 * exp(-0.5 * sum_i (x_i - x'_i)^2 / l_i^2)
/// Matern32:  k(x, x') = sf2 * (1 + sqrt(3) r) * exp(-sqrt(3) r),
///            r^2 = sum_i (x_i - x'_i)^2 / l_i^2
struct KernelSpec {
  KernelFamily family = KernelFamily::RBF;
  Vector lengthscales;          // length d, strictly positive
  double signal_variance = 1.0; // sf2, strictly positive

  Index dim() const { return lengthscales.size(); }
  void validate() const;

  static KernelSpec rbf(const Vector& lengthscales, double signal_variance);
  static KernelSpec rbf(double lengthscale, Index dim, double signal_variance);
  static KernelSpec matern32(const Vector& lengthscales, double signal_variance);
};

/// Full model hyperparameters: kernel, observation noise, and (for sparse
/// models) the inducing inputs Z.
struct Hyperparameters {
  KernelSpec kernel;
  double noise_variance = 1e-2;          // strictly positive
  std::optional<Matrix> inducing_inputs; // m x d

  Index dim() const { return kernel.dim(); }
  void validate() const;
  void validate(Index data_dim) const;
};

/// Names one raw (not log) hyperparameter of a KernelSpec/Hyperparameters.
struct ParamSelector {
  enum class Kind { Lengthscale, SignalVariance, NoiseVariance };

  Kind kind = Kind::SignalVariance;
  int index = 0;  // lengthscale dimension, ignored otherwise

  static ParamSelector lengthscale(int i) { return {Kind::Lengthscale, i}; }
  static ParamSelector signal_variance() { return {Kind::SignalVariance, 0}; }
  static ParamSelector noise_variance() { return {Kind::NoiseVariance, 0}; }

  std::string name() const;
};

/// All kernel parameters plus noise, in the order lengthscale_0..d-1,
/// signal_variance, noise_variance. This is the canonical gradient ordering
/// used by the trainers.
std::vector<ParamSelector> all_param_selectors(Index dim);

/// Dense covariance matrix [k(x_i, y_j)].
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& X, const Matrix& Y);

/// Just the diagonal k(x_i, x_i); avoids materializing an n x n matrix.
Vector kernel_diagonal(const KernelSpec& spec, const Matrix& X);

/// Entrywise partial derivative of the noisy covariance K + noise * I with
/// respect to the selected raw parameter. The noise_variance derivative is
/// the identity when X and Y are the same point set and zero otherwise.
/// Matern32 lengthscale derivatives are not provided (UnsupportedParam); the
/// trainers fall back to finite differences for that family.
Matrix kernel_matrix_grad(const KernelSpec& spec, const Matrix& X, const Matrix& Y,
                          const ParamSelector& param);

}  // namespace dgp
