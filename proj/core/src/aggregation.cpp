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

#include "dgp/aggregation.hpp"

#include <cmath>

#include "dgp/instrumentation.hpp"
#include "dgp/parallel.hpp"

namespace dgp {

namespace {

Vector prior_variance(const Hyperparameters& hp, const Matrix& Xstar) {
  return kernel_diagonal(hp.kernel, Xstar).array() + hp.noise_variance;
}

void clamp_variances(GaussianPrediction& pred) {
  for (Index i = 0; i < pred.variance.size(); ++i) {
    if (pred.variance(i) < 0.0) {
      pred.variance(i) = 0.0;
      ++pred.clamped_variances;
    }
  }
}

/// Shared precision-weighted combiner for the PoE/BCM family. `correction`
/// adds (1 - sum beta) / prior to the joint precision.
GaussianPrediction combine_precision_weighted(
    const std::vector<GaussianPrediction>& locals, const Vector& prior_var,
    PoeRule rule) {
  const std::size_t experts = locals.size();
  const Index nt = locals.front().size();
  const bool corrected = rule == PoeRule::BCM || rule == PoeRule::RBCM;

  GaussianPrediction pred;
  pred.mean.resize(nt);
  pred.variance.resize(nt);
  for (Index t = 0; t < nt; ++t) {
    double precision = 0.0;
    double weighted_mean = 0.0;
    double beta_sum = 0.0;
    for (std::size_t i = 0; i < experts; ++i) {
      const double var_i = locals[i].variance(t);
      double beta = 1.0;
      if (rule == PoeRule::GPoE) {
        beta = 1.0 / static_cast<double>(experts);
      } else if (rule == PoeRule::RBCM) {
        beta = 0.5 * (std::log(prior_var(t)) - std::log(var_i));
      }
      precision += beta / var_i;
      weighted_mean += beta * locals[i].mean(t) / var_i;
      beta_sum += beta;
    }
    if (corrected) precision += (1.0 - beta_sum) / prior_var(t);
    if (!(precision > 0.0)) {
      precision = 1.0 / prior_var(t);
      ++pred.clamped_precisions;
    }
    pred.variance(t) = 1.0 / precision;
    pred.mean(t) = pred.variance(t) * weighted_mean;
  }
  clamp_variances(pred);
  return pred;
}

/// grBCM fusion from the communication expert's prediction and the augmented
/// experts' predictions (index 0 of `augmented` is expert 2 of the paper's
/// numbering, carrying weight 1).
GaussianPrediction combine_grbcm(const GaussianPrediction& communication,
                                 const std::vector<GaussianPrediction>& augmented,
                                 const Vector& prior_var) {
  const Index nt = communication.size();
  GaussianPrediction pred;
  pred.mean.resize(nt);
  pred.variance.resize(nt);
  for (Index t = 0; t < nt; ++t) {
    double precision = 0.0;
    double weighted_mean = 0.0;
    double beta_sum = 0.0;
    for (std::size_t i = 0; i < augmented.size(); ++i) {
      const double var_i = augmented[i].variance(t);
      const double beta =
          i == 0 ? 1.0
                 : 0.5 * (std::log(communication.variance(t)) - std::log(var_i));
      precision += beta / var_i;
      weighted_mean += beta * augmented[i].mean(t) / var_i;
      beta_sum += beta;
    }
    const double comm_precision = 1.0 / communication.variance(t);
    precision -= (beta_sum - 1.0) * comm_precision;
    weighted_mean -= (beta_sum - 1.0) * comm_precision * communication.mean(t);
    if (!(precision > 0.0)) {
      precision = 1.0 / prior_var(t);
      ++pred.clamped_precisions;
    }
    pred.variance(t) = 1.0 / precision;
    pred.mean(t) = pred.variance(t) * weighted_mean;
  }
  clamp_variances(pred);
  return pred;
}

std::vector<GaussianPrediction> local_predictions(const ExactEnsemble& ensemble,
                                                  const Matrix& Xstar) {
  std::vector<GaussianPrediction> locals(ensemble.experts.size());
  parallel_for(ensemble.experts.size(), [&](std::size_t i) {
    locals[i] = posterior(ensemble.experts[i], Xstar);
  });
  return locals;
}

std::vector<GaussianPrediction> local_predictions(const SvgpEnsemble& ensemble,
                                                  const Matrix& Xstar) {
  std::vector<GaussianPrediction> locals(ensemble.experts.size());
  parallel_for(ensemble.experts.size(), [&](std::size_t i) {
    locals[i] = predict(ensemble.experts[i], Xstar);
  });
  return locals;
}

std::vector<int> merged_indices(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// Solves the weight system A beta = diag(A) and symmetrizes the stored Gram.
WeightSolution solve_weights(Matrix gram) {
  gram = 0.5 * (gram + gram.transpose()).eval();
  SymmetricSolve solve = solve_symmetric_with_fallback(gram, gram.diagonal());
  WeightSolution weights;
  weights.beta = std::move(solve.solution);
  weights.fallback_used = solve.used_fallback;
  weights.gram = std::move(gram);
  return weights;
}

}  // namespace

Matrix central_inputs(const Dataset& data, const CentralSubset& central) {
  Matrix out(static_cast<Index>(central.indices.size()), data.dim());
  for (std::size_t i = 0; i < central.indices.size(); ++i) {
    out.row(static_cast<Index>(i)) = data.X.row(central.indices[i]);
  }
  return out;
}

ExactEnsemble build_exact_ensemble(const Dataset& data, const Partition& partition,
                                   const Hyperparameters& hp,
                                   unsigned long central_seed) {
  ExactEnsemble ensemble;
  ensemble.hp = hp;
  ensemble.data = data;
  ensemble.partition = partition;
  ensemble.central = select_central_subset(partition, central_seed);
  ensemble.experts.resize(partition.shards.size());
  parallel_for(partition.shards.size(), [&](std::size_t i) {
    ensemble.experts[i] = ExactGpModel::fit(data.rows(partition.shards[i]), hp);
  });
  return ensemble;
}

SvgpEnsemble build_svgp_ensemble(const Dataset& data, const Partition& partition,
                                 const Hyperparameters& hp,
                                 unsigned long central_seed) {
  if (!hp.inducing_inputs) {
    throw ConfigError("SVGP ensemble requires shared inducing inputs");
  }
  SvgpEnsemble ensemble;
  ensemble.hp = hp;
  ensemble.data = data;
  ensemble.partition = partition;
  ensemble.central = select_central_subset(partition, central_seed);
  ensemble.experts.resize(partition.shards.size());
  parallel_for(partition.shards.size(), [&](std::size_t i) {
    ensemble.experts[i] = SvgpModel::fit(data.rows(partition.shards[i]), hp);
  });
  return ensemble;
}

GaussianPrediction aggregate_poe_family(const ExactEnsemble& ensemble,
                                        const Matrix& Xstar, PoeRule rule) {
  if (ensemble.experts.empty()) throw TooFewExperts("ensemble has no experts");
  return combine_precision_weighted(local_predictions(ensemble, Xstar),
                                    prior_variance(ensemble.hp, Xstar), rule);
}

GaussianPrediction aggregate_poe_family(const SvgpEnsemble& ensemble,
                                        const Matrix& Xstar, PoeRule rule) {
  if (ensemble.experts.empty()) throw TooFewExperts("ensemble has no experts");
  return combine_precision_weighted(local_predictions(ensemble, Xstar),
                                    prior_variance(ensemble.hp, Xstar), rule);
}

GaussianPrediction aggregate_grbcm(const ExactEnsemble& ensemble, const Matrix& Xstar) {
  const int experts = ensemble.expert_count();
  if (experts < 2) throw TooFewExperts("grBCM needs at least two experts");

  GaussianPrediction communication = posterior(ensemble.experts[0], Xstar);
  std::vector<GaussianPrediction> augmented(static_cast<std::size_t>(experts - 1));
  parallel_for(augmented.size(), [&](std::size_t i) {
    const auto indices = merged_indices(ensemble.partition.shards[0],
                                        ensemble.partition.shards[i + 1]);
    ExactGpModel model = ExactGpModel::fit(ensemble.data.rows(indices), ensemble.hp);
    augmented[i] = posterior(model, Xstar);
  });
  return combine_grbcm(communication, augmented,
                       prior_variance(ensemble.hp, Xstar));
}

GaussianPrediction aggregate_grbcm(const SvgpEnsemble& ensemble, const Matrix& Xstar) {
  const int experts = ensemble.expert_count();
  if (experts < 2) throw TooFewExperts("grBCM needs at least two experts");

  GaussianPrediction communication = predict(ensemble.experts[0], Xstar);
  std::vector<GaussianPrediction> augmented(static_cast<std::size_t>(experts - 1));
  parallel_for(augmented.size(), [&](std::size_t i) {
    const auto indices = merged_indices(ensemble.partition.shards[0],
                                        ensemble.partition.shards[i + 1]);
    SvgpModel model = SvgpModel::fit(ensemble.data.rows(indices), ensemble.hp);
    augmented[i] = predict(model, Xstar);
  });
  return combine_grbcm(communication, augmented,
                       prior_variance(ensemble.hp, Xstar));
}

GaussianPrediction aggregate_npae(const ExactEnsemble& ensemble, const Matrix& Xstar) {
  const std::size_t experts = ensemble.experts.size();
  if (experts == 0) throw TooFewExperts("ensemble has no experts");
  const Index nt = Xstar.rows();
  const double noise = ensemble.hp.noise_variance;

  // Per expert: cross kernel to the test points and its noisy-kernel solve.
  std::vector<Matrix> cross(experts);   // n_i x nt
  std::vector<Matrix> solved(experts);  // Ky_i^{-1} cross_i
  std::vector<Vector> means(experts);
  parallel_for(experts, [&](std::size_t i) {
    const ExactGpModel& model = ensemble.experts[i];
    cross[i] = kernel_matrix(model.hp.kernel, model.train_X, Xstar);
    solved[i] = solve_spd(model.factor, cross[i]);
    means[i] = cross[i].transpose() * model.alpha;
  });

  // cov[mu_i, y*] per test point; doubles as the diagonal cov[mu_i, mu_i].
  Matrix cov_to_target(static_cast<Index>(experts), nt);
  for (std::size_t i = 0; i < experts; ++i) {
    cov_to_target.row(static_cast<Index>(i)) =
        (cross[i].array() * solved[i].array()).colwise().sum();
  }

  // Off-diagonal cov[mu_i, mu_j] for every pair, evaluated at every point.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < experts; ++i) {
    for (std::size_t j = i + 1; j < experts; ++j) pairs.emplace_back(i, j);
  }
  std::vector<Vector> pair_cov(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    Matrix kij = kernel_matrix(ensemble.hp.kernel, ensemble.experts[i].train_X,
                               ensemble.experts[j].train_X);
    pair_cov[p] =
        (solved[i].array() * (kij * solved[j]).array()).colwise().sum().transpose();
  });

  Vector diag_kss = kernel_diagonal(ensemble.hp.kernel, Xstar);
  GaussianPrediction pred;
  pred.mean.resize(nt);
  pred.variance.resize(nt);

  Matrix system(static_cast<Index>(experts), static_cast<Index>(experts));
  Vector to_target(static_cast<Index>(experts));
  Vector local_means(static_cast<Index>(experts));
  for (Index t = 0; t < nt; ++t) {
    for (std::size_t i = 0; i < experts; ++i) {
      system(static_cast<Index>(i), static_cast<Index>(i)) =
          cov_to_target(static_cast<Index>(i), t);
      to_target(static_cast<Index>(i)) = cov_to_target(static_cast<Index>(i), t);
      local_means(static_cast<Index>(i)) = means[i](t);
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      system(static_cast<Index>(i), static_cast<Index>(j)) = pair_cov[p](t);
      system(static_cast<Index>(j), static_cast<Index>(i)) = pair_cov[p](t);
    }
    Vector mean_solve;
    Vector target_solve;
    try {
      SpdFactor factor = cholesky_jittered(system);
      mean_solve = solve_spd(factor, local_means);
      target_solve = solve_spd(factor, to_target);
    } catch (const NonPositiveDefinite&) {
      // Far from all data every covariance underflows; the minimum-norm
      // solve returns zero weights and the prediction reverts to the prior.
      mean_solve = solve_symmetric_with_fallback(system, local_means).solution;
      target_solve = solve_symmetric_with_fallback(system, to_target).solution;
    }
    pred.mean(t) = to_target.dot(mean_solve);
    pred.variance(t) = diag_kss(t) - to_target.dot(target_solve) + noise;
  }
  clamp_variances(pred);
  return pred;
}

WeightSolution optimal_weights_svgp(const SvgpEnsemble& ensemble) {
  const std::size_t experts = ensemble.experts.size();
  if (experts == 0) throw TooFewExperts("ensemble has no experts");
  const SvgpModel& first = ensemble.experts.front();
  const Matrix& Z = *ensemble.hp.inducing_inputs;
  const Index m = Z.rows();
  const double noise_inv = 1.0 / ensemble.hp.noise_variance;

  Matrix Xc = central_inputs(ensemble.data, ensemble.central);
  Matrix kuc = kernel_matrix(ensemble.hp.kernel, Z, Xc);  // m x M
  Matrix center = first.Kuu;
  center.noalias() += noise_inv * (kuc * kuc.transpose());
  note_allocation(m, m, "weights_center");

  Matrix stacked(m, static_cast<Index>(experts));
  for (std::size_t i = 0; i < experts; ++i) {
    stacked.col(static_cast<Index>(i)) = ensemble.experts[i].alpha;
  }
  Matrix gram = noise_inv * (stacked.transpose() * center * stacked);
  note_allocation(gram.rows(), gram.cols(), "weights_gram");
  return solve_weights(std::move(gram));
}

GaussianPrediction aggregate_opt_svgp(const SvgpEnsemble& ensemble,
                                      const WeightSolution& weights,
                                      const Matrix& Xstar) {
  const std::size_t experts = ensemble.experts.size();
  if (weights.beta.size() != static_cast<Index>(experts)) {
    throw DimensionMismatch("weight vector length does not match expert count");
  }
  const Matrix& Z = *ensemble.hp.inducing_inputs;
  const double noise_inv = 1.0 / ensemble.hp.noise_variance;
  const Index nt = Xstar.rows();

  Matrix kus = kernel_matrix(ensemble.hp.kernel, Z, Xstar);  // m x nt

  GaussianPrediction pred;
  pred.mean = Vector::Zero(nt);
  pred.variance = Vector::Zero(nt);

  std::vector<Vector> explained(experts);
  parallel_for(experts, [&](std::size_t i) {
    explained[i] = solve_lower(ensemble.experts[i].m_factor, kus)
                       .colwise()
                       .squaredNorm()
                       .transpose();
  });

  // Fixed-order reductions keep the result independent of scheduling.
  for (std::size_t i = 0; i < experts; ++i) {
    const double beta = weights.beta(static_cast<Index>(i));
    pred.mean.noalias() +=
        beta * noise_inv * (kus.transpose() * ensemble.experts[i].alpha);
    pred.variance += beta * beta * explained[i];
  }
  clamp_variances(pred);
  return pred;
}

WeightSolution optimal_weights_exact(const ExactEnsemble& ensemble) {
  const std::size_t experts = ensemble.experts.size();
  if (experts == 0) throw TooFewExperts("ensemble has no experts");

  Matrix Xc = central_inputs(ensemble.data, ensemble.central);

  // Per expert: K(Xc, Xi) alpha_i, the data-fit half of the scalar product.
  std::vector<Vector> fit_features(experts);
  parallel_for(experts, [&](std::size_t i) {
    const ExactGpModel& model = ensemble.experts[i];
    fit_features[i] =
        kernel_matrix(model.hp.kernel, Xc, model.train_X) * model.alpha;
  });

  Matrix gram(static_cast<Index>(experts), static_cast<Index>(experts));
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < experts; ++i)
    for (std::size_t j = i; j < experts; ++j) cells.emplace_back(i, j);
  parallel_for(cells.size(), [&](std::size_t c) {
    const auto [i, j] = cells[c];
    const ExactGpModel& a = ensemble.experts[i];
    const ExactGpModel& b = ensemble.experts[j];
    Matrix kij = kernel_matrix(ensemble.hp.kernel, a.train_X, b.train_X);
    const double value =
        a.alpha.dot(kij * b.alpha) + fit_features[i].dot(fit_features[j]);
    gram(static_cast<Index>(i), static_cast<Index>(j)) = value;
    gram(static_cast<Index>(j), static_cast<Index>(i)) = value;
  });
  return solve_weights(std::move(gram));
}

GaussianPrediction aggregate_opt_exact(const ExactEnsemble& ensemble,
                                       const WeightSolution& weights,
                                       const Matrix& Xstar) {
  const std::size_t experts = ensemble.experts.size();
  if (weights.beta.size() != static_cast<Index>(experts)) {
    throw DimensionMismatch("weight vector length does not match expert count");
  }
  const Index nt = Xstar.rows();

  std::vector<Vector> term_means(experts);
  std::vector<Vector> term_vars(experts);
  parallel_for(experts, [&](std::size_t i) {
    const ExactGpModel& model = ensemble.experts[i];
    Matrix ks = kernel_matrix(model.hp.kernel, model.train_X, Xstar);
    term_means[i] = ks.transpose() * model.alpha;
    term_vars[i] =
        solve_lower(model.factor, ks).colwise().squaredNorm().transpose();
  });

  GaussianPrediction pred;
  pred.mean = Vector::Zero(nt);
  pred.variance = Vector::Zero(nt);
  for (std::size_t i = 0; i < experts; ++i) {
    const double beta = weights.beta(static_cast<Index>(i));
    pred.mean += beta * term_means[i];
    pred.variance += beta * beta * term_vars[i];
  }
  clamp_variances(pred);
  return pred;
}

}  // namespace dgp
