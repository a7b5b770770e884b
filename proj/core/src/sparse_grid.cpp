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

#include "dgp/sparse_grid.hpp"

#include <cmath>
#include <string>

#include "dgp/parallel.hpp"

namespace dgp {

namespace {

constexpr long long kMaxGridPoints = 10'000'000;

void check_eta_d(int eta, int d) {
  if (eta < 1 || d < 1) {
    throw ConfigError("sparse grid level and dimension must be >= 1 (got eta=" +
                      std::to_string(eta) + ", d=" + std::to_string(d) + ")");
  }
}

void append_compositions(int remaining_sum, int remaining_dims,
                         std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  if (remaining_dims == 1) {
    if (remaining_sum >= 1) {
      prefix.push_back(remaining_sum);
      out.push_back(MultiIndex{prefix});
      prefix.pop_back();
    }
    return;
  }
  for (int first = 1; first + (remaining_dims - 1) <= remaining_sum; ++first) {
    prefix.push_back(first);
    append_compositions(remaining_sum - first, remaining_dims - 1, prefix, out);
    prefix.pop_back();
  }
}

void check_box(const Box& box, int d) {
  if (static_cast<int>(box.size()) != d) {
    throw DimensionMismatch("box has " + std::to_string(box.size()) +
                            " dimensions, expected " + std::to_string(d));
  }
  for (const auto& [lo, hi] : box) {
    if (!(lo < hi)) throw ConfigError("box bounds must satisfy lower < upper");
  }
}

}  // namespace

int MultiIndex::sum() const {
  int s = 0;
  for (int l : levels) s += l;
  return s;
}

Box unit_box(int d) { return Box(static_cast<std::size_t>(d), {0.0, 1.0}); }

Box symmetric_box(int d, double half_width) {
  return Box(static_cast<std::size_t>(d), {-half_width, half_width});
}

std::vector<MultiIndex> enumerate_indices(int eta, int d) {
  check_eta_d(eta, d);
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  for (int s = eta; s <= eta + d - 1; ++s) {
    append_compositions(s, d, prefix, out);
  }
  return out;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long value = 1;
  for (int i = 1; i <= k; ++i) {
    value = value * (n - k + i) / i;
  }
  return value;
}

long long index_count(int eta, int d) {
  check_eta_d(eta, d);
  long long b = 0;
  for (int s = eta; s <= eta + d - 1; ++s) b += binomial(s - 1, d - 1);
  return b;
}

long long grid_point_count(const MultiIndex& index) {
  long long count = 1;
  for (int l : index.levels) {
    if (l < 1 || l > 60) throw IndexOutOfRange("grid level out of range");
    count *= (1LL << l) - 1;
    if (count > kMaxGridPoints) {
      throw OverflowGuard("grid would have more than 1e7 points");
    }
  }
  return count;
}

Matrix grid_points(const MultiIndex& index, const Box& box) {
  const int d = index.dim();
  if (d == 0) throw ConfigError("empty multi-index");
  check_box(box, d);
  const long long total = grid_point_count(index);

  std::vector<std::vector<double>> axes(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const long long denom = 1LL << index.levels[j];
    const auto& [lo, hi] = box[static_cast<std::size_t>(j)];
    axes[j].reserve(static_cast<std::size_t>(denom - 1));
    for (long long i = 1; i < denom; ++i) {
      const double unit = static_cast<double>(i) / static_cast<double>(denom);
      axes[j].push_back(lo + (hi - lo) * unit);
    }
  }

  Matrix points(total, d);
  std::vector<std::size_t> odometer(static_cast<std::size_t>(d), 0);
  for (long long row = 0; row < total; ++row) {
    for (int j = 0; j < d; ++j) points(row, j) = axes[j][odometer[j]];
    // Last dimension varies fastest.
    for (int j = d - 1; j >= 0; --j) {
      if (++odometer[j] < axes[j].size()) break;
      odometer[j] = 0;
    }
  }
  return points;
}

long long ct_coefficient(const MultiIndex& index, int eta, int d) {
  check_eta_d(eta, d);
  if (index.dim() != d) {
    throw IndexOutOfRange("multi-index dimension does not match d");
  }
  for (int l : index.levels) {
    if (l < 1) throw IndexOutOfRange("multi-index has a level below 1");
  }
  const int s = index.sum();
  if (s < eta || s > eta + d - 1) {
    throw IndexOutOfRange("index sum " + std::to_string(s) +
                          " outside [" + std::to_string(eta) + ", " +
                          std::to_string(eta + d - 1) + "]");
  }
  const int exponent = eta + d - 1 - s;
  const long long sign = exponent % 2 == 0 ? 1 : -1;
  return sign * binomial(d - 1, s - eta);
}

namespace {

/// Builds the per-grid statistics; optionally keeps the cross kernels
/// K_{u_l f} for a following Gram pass.
std::vector<CombinationTerm> build_terms(const Dataset& data,
                                         const Hyperparameters& hp,
                                         const std::vector<MultiIndex>& indices,
                                         int eta, int d, const Box& box,
                                         std::vector<Matrix>* cross_out) {
  data.check_consistent();
  hp.validate(d);
  check_eta_d(eta, d);
  check_box(box, d);
  if (data.size() < 1) throw EmptyDataset("opticom requires at least one sample");
  if (indices.empty()) throw ConfigError("opticom requires at least one index");

  const std::size_t b = indices.size();
  const double noise_inv = 1.0 / hp.noise_variance;
  std::vector<CombinationTerm> terms(b);
  if (cross_out) cross_out->resize(b);

  parallel_for(b, [&](std::size_t i) {
    CombinationTerm& term = terms[i];
    term.index = indices[i];
    term.ct_coefficient = ct_coefficient(indices[i], eta, d);
    term.grid = grid_points(indices[i], box);
    Matrix kuu = kernel_matrix(hp.kernel, term.grid, term.grid);
    Matrix cross = kernel_matrix(hp.kernel, term.grid, data.X);
    Matrix m = kuu;
    m.noalias() += noise_inv * (cross * cross.transpose());
    term.factor = cholesky_jittered(m);
    term.alpha = solve_spd(term.factor, Vector(cross * data.y));
    if (cross_out) (*cross_out)[i] = std::move(cross);
  });
  return terms;
}

}  // namespace

OptiComSolution opticom_coefficients_for_indices(const Dataset& data,
                                                 const Hyperparameters& hp,
                                                 const std::vector<MultiIndex>& indices,
                                                 int eta, int d, const Box& box) {
  const std::size_t b = indices.size();
  const double noise_inv = 1.0 / hp.noise_variance;

  OptiComSolution solution;
  std::vector<Matrix> cross_kernels;  // K_{u_l f}, kept for the Gram pass
  solution.terms = build_terms(data, hp, indices, eta, d, box, &cross_kernels);

  // Gram of regularized least-squares scalar products; every cell written
  // exactly once so the parallel schedule cannot change the result.
  Matrix gram(b, b);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = i; j < b; ++j) cells.emplace_back(i, j);
  }
  parallel_for(cells.size(), [&](std::size_t c) {
    const auto [i, j] = cells[c];
    const CombinationTerm& ti = solution.terms[i];
    const CombinationTerm& tj = solution.terms[j];
    Matrix mij = kernel_matrix(hp.kernel, ti.grid, tj.grid);
    mij.noalias() += noise_inv * (cross_kernels[i] * cross_kernels[j].transpose());
    const double value = noise_inv * ti.alpha.dot(mij * tj.alpha);
    gram(static_cast<Index>(i), static_cast<Index>(j)) = value;
    gram(static_cast<Index>(j), static_cast<Index>(i)) = value;
  });

  SymmetricSolve solve = solve_symmetric_with_fallback(gram, gram.diagonal());
  solution.coefficients = std::move(solve.solution);
  solution.used_fallback = solve.used_fallback;
  solution.gram = std::move(gram);
  return solution;
}

OptiComSolution opticom_coefficients(const Dataset& data, const Hyperparameters& hp,
                                     int eta, int d, const Box& box) {
  return opticom_coefficients_for_indices(data, hp, enumerate_indices(eta, d), eta,
                                          d, box);
}

namespace {

GaussianPrediction combined_posterior_impl(const std::vector<CombinationTerm>& terms,
                                           const Vector& mean_weights,
                                           const Hyperparameters& hp,
                                           const Matrix& Xstar, bool full_cov) {
  const Index nt = Xstar.rows();
  GaussianPrediction pred;
  pred.mean = Vector::Zero(nt);
  pred.variance = Vector::Zero(nt);
  if (full_cov) pred.covariance = Matrix::Zero(nt, nt);
  if (nt == 0) return pred;

  const double noise_inv = 1.0 / hp.noise_variance;
  Vector diag_kss = kernel_diagonal(hp.kernel, Xstar);
  Matrix kss;
  if (full_cov) kss = kernel_matrix(hp.kernel, Xstar, Xstar);

  for (std::size_t i = 0; i < terms.size(); ++i) {
    const CombinationTerm& term = terms[i];
    const double mean_weight = mean_weights(static_cast<Index>(i));
    const double ct = static_cast<double>(term.ct_coefficient);

    Matrix kus = kernel_matrix(hp.kernel, term.grid, Xstar);
    pred.mean.noalias() += mean_weight * (kus.transpose() * term.alpha);

    // Covariance summand: ct * [k(s, s') - P + Q] with
    // P = Ksu Kuu^{-1} Kus (prior reduction) and Q = Ksu M^{-1} Kus.
    SpdFactor kuu_factor =
        cholesky_jittered(kernel_matrix(hp.kernel, term.grid, term.grid));
    Matrix prior_half = solve_lower(kuu_factor, kus);
    Matrix data_half = solve_lower(term.factor, kus);
    if (full_cov) {
      Matrix summand = kss;
      summand.noalias() -= prior_half.transpose() * prior_half;
      summand.noalias() += data_half.transpose() * data_half;
      *pred.covariance += ct * summand;
    } else {
      pred.variance +=
          ct * (diag_kss - prior_half.colwise().squaredNorm().transpose() +
                data_half.colwise().squaredNorm().transpose())
                   .matrix();
    }
  }
  pred.mean *= noise_inv;

  if (full_cov) pred.variance = pred.covariance->diagonal();
  for (Index i = 0; i < nt; ++i) {
    if (pred.variance(i) < 0.0) {
      pred.variance(i) = 0.0;
      ++pred.clamped_variances;
    }
  }
  if (pred.covariance) {
    for (Index i = 0; i < nt; ++i) (*pred.covariance)(i, i) = pred.variance(i);
  }
  return pred;
}

Vector binomial_weights(const std::vector<CombinationTerm>& terms) {
  Vector w(static_cast<Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    w(static_cast<Index>(i)) = static_cast<double>(terms[i].ct_coefficient);
  }
  return w;
}

}  // namespace

std::vector<CombinationTerm> combination_terms(const Dataset& data,
                                               const Hyperparameters& hp, int eta,
                                               int d, const Box& box) {
  return build_terms(data, hp, enumerate_indices(eta, d), eta, d, box, nullptr);
}

GaussianPrediction combination_posterior(const std::vector<CombinationTerm>& terms,
                                         const Hyperparameters& hp,
                                         const Matrix& Xstar, bool full_cov) {
  return combined_posterior_impl(terms, binomial_weights(terms), hp, Xstar,
                                 full_cov);
}

GaussianPrediction opticom_posterior(const OptiComSolution& solution,
                                     const Hyperparameters& hp, const Matrix& Xstar,
                                     MeanWeights mean_weights, bool full_cov) {
  const Vector weights = mean_weights == MeanWeights::Optimized
                             ? solution.coefficients
                             : binomial_weights(solution.terms);
  return combined_posterior_impl(solution.terms, weights, hp, Xstar, full_cov);
}

GaussianPrediction opticom_posterior(const Dataset& data, const Hyperparameters& hp,
                                     int eta, int d, const Box& box,
                                     const Matrix& Xstar, MeanWeights mean_weights,
                                     bool full_cov) {
  OptiComSolution solution = opticom_coefficients(data, hp, eta, d, box);
  return opticom_posterior(solution, hp, Xstar, mean_weights, full_cov);
}

}  // namespace dgp
