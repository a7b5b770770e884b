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

#include "dgp/svgp.hpp"

#include <cmath>
#include <functional>
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
}

double elbo_at(const Dataset& data, const Hyperparameters& hp) {
  return elbo(SvgpModel::fit(data, hp));
}

}  // namespace

SvgpModel SvgpModel::fit(const Dataset& data, const Hyperparameters& hp) {
  data.check_consistent();
  hp.validate(data.dim());
  if (!hp.inducing_inputs) {
    throw ConfigError("SVGP requires inducing inputs");
  }
  if (hp.inducing_inputs->rows() < 1) {
    throw ConfigError("SVGP requires at least one inducing input");
  }

  SvgpModel model;
  model.hp = hp;
  model.train_X = data.X;
  model.train_y = data.y;
  const Matrix& Z = *model.hp.inducing_inputs;
  model.Kuu = kernel_matrix(hp.kernel, Z, Z);
  model.kuu_factor = cholesky_jittered(model.Kuu);
  model.Kuf = kernel_matrix(hp.kernel, Z, data.X);
  Matrix m = model.Kuu;
  m.noalias() += (1.0 / hp.noise_variance) * (model.Kuf * model.Kuf.transpose());
  model.m_factor = cholesky_jittered(m);
  model.alpha = solve_spd(model.m_factor, Vector(model.Kuf * data.y));
  return model;
}

VariationalDistribution optimal_variational(const SvgpModel& model) {
  VariationalDistribution q;
  q.mean = (1.0 / model.hp.noise_variance) * (model.Kuu * model.alpha);
  Matrix s = model.Kuu * solve_spd(model.m_factor, model.Kuu);
  q.covariance = 0.5 * (s + s.transpose());
  return q;
}

double elbo(const SvgpModel& model) {
  const double noise = model.hp.noise_variance;
  const double n = static_cast<double>(model.size());

  // Quadratic term of log N(y | 0, Q + noise I) through the inversion lemma:
  // y^T (Q + noise I)^{-1} y = noise^{-1} (y^T y - noise^{-1} z^T M^{-1} z),
  // z = Kuf y. M^{-1} z is the cached alpha.
  Vector z = model.Kuf * model.train_y;
  const double quad =
      (model.train_y.squaredNorm() - z.dot(model.alpha) / noise) / noise;

  // log det(Q + noise I) = n log noise + log det M - log det Kuu.
  const double logdet =
      n * std::log(noise) + log_det(model.m_factor) - log_det(model.kuu_factor);

  const double log_density =
      -0.5 * (quad + logdet + n * std::log(2.0 * std::numbers::pi));

  // tr(Kff - Q) = sum diag(Kff) - |Luu^{-1} Kuf|_F^2.
  const double trace_kff = kernel_diagonal(model.hp.kernel, model.train_X).sum();
  const double trace_q = solve_lower(model.kuu_factor, model.Kuf).squaredNorm();

  return log_density - 0.5 * (trace_kff - trace_q) / noise;
}

std::vector<std::string> SvgpParamSet::names(const SvgpModel& model) const {
  std::vector<std::string> out;
  if (lengthscales) {
    for (Index i = 0; i < model.hp.dim(); ++i) {
      out.push_back("lengthscale_" + std::to_string(i));
    }
  }
  if (signal_variance) out.push_back("signal_variance");
  if (noise_variance) out.push_back("noise_variance");
  if (inducing_inputs) {
    const Matrix& Z = *model.hp.inducing_inputs;
    for (Index i = 0; i < Z.rows(); ++i) {
      for (Index j = 0; j < Z.cols(); ++j) {
        out.push_back("z_" + std::to_string(i) + "_" + std::to_string(j));
      }
    }
  }
  return out;
}

Vector elbo_gradient(const SvgpModel& model, const SvgpParamSet& params,
                     double rel_step) {
  Dataset data{model.train_X, model.train_y};

  // Accessors into a Hyperparameters copy, in the documented order.
  struct Accessor {
    std::function<double&(Hyperparameters&)> ref;
    bool positive;
  };
  std::vector<Accessor> accessors;
  if (params.lengthscales) {
    for (Index i = 0; i < model.hp.dim(); ++i) {
      accessors.push_back(
          {[i](Hyperparameters& h) -> double& { return h.kernel.lengthscales(i); },
           true});
    }
  }
  if (params.signal_variance) {
    accessors.push_back(
        {[](Hyperparameters& h) -> double& { return h.kernel.signal_variance; },
         true});
  }
  if (params.noise_variance) {
    accessors.push_back(
        {[](Hyperparameters& h) -> double& { return h.noise_variance; }, true});
  }
  if (params.inducing_inputs) {
    const Matrix& Z = *model.hp.inducing_inputs;
    for (Index i = 0; i < Z.rows(); ++i) {
      for (Index j = 0; j < Z.cols(); ++j) {
        accessors.push_back(
            {[i, j](Hyperparameters& h) -> double& { return (*h.inducing_inputs)(i, j); },
             false});
      }
    }
  }

  Vector grad(static_cast<Index>(accessors.size()));
  for (std::size_t p = 0; p < accessors.size(); ++p) {
    Hyperparameters hp = model.hp;
    double& value = accessors[p].ref(hp);
    const double base = value;
    const double step =
        accessors[p].positive ? rel_step * base : rel_step * (std::abs(base) + 1.0);
    value = base + step;
    const double up = elbo_at(data, hp);
    value = base - step;
    const double down = elbo_at(data, hp);
    grad(static_cast<Index>(p)) = (up - down) / (2.0 * step);
  }
  return grad;
}

GaussianPrediction predict(const SvgpModel& model, const Matrix& Xstar,
                           bool full_cov) {
  if (Xstar.cols() != model.hp.dim()) {
    throw DimensionMismatch("test inputs have dimension " +
                            std::to_string(Xstar.cols()) + ", model expects " +
                            std::to_string(model.hp.dim()));
  }
  GaussianPrediction pred;
  if (Xstar.rows() == 0) {
    pred.mean.resize(0);
    pred.variance.resize(0);
    return pred;
  }
  const Matrix& Z = *model.hp.inducing_inputs;
  Matrix kus = kernel_matrix(model.hp.kernel, Z, Xstar);  // m x nt
  pred.mean = kus.transpose() * model.alpha / model.hp.noise_variance;

  Matrix prior_half = solve_lower(model.kuu_factor, kus);  // Luu^{-1} Kus
  Matrix data_half = solve_lower(model.m_factor, kus);     // Lm^{-1} Kus
  if (full_cov) {
    Matrix cov = kernel_matrix(model.hp.kernel, Xstar, Xstar);
    cov.noalias() -= prior_half.transpose() * prior_half;
    cov.noalias() += data_half.transpose() * data_half;
    pred.covariance = cov;
    pred.variance = cov.diagonal();
  } else {
    pred.variance = kernel_diagonal(model.hp.kernel, Xstar) -
                    prior_half.colwise().squaredNorm().transpose() +
                    data_half.colwise().squaredNorm().transpose();
  }
  clamp_variances(pred);
  if (pred.covariance) {
    for (Index i = 0; i < pred.variance.size(); ++i) {
      (*pred.covariance)(i, i) = pred.variance(i);
    }
  }
  return pred;
}

}  // namespace dgp
