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
#include "dgp/sparse_grid.hpp"
#include "dgp/types.hpp"

namespace dgp {

/// z-score parameters fitted on a training split.
struct Standardizer {
  Vector feature_mean;
  Vector feature_std;
  double target_mean = 0.0;
  double target_std = 1.0;

  Dataset apply(const Dataset& data) const;
  double destandardize_mean(double standardized) const;
  double destandardize_variance(double standardized) const;
};

struct CsvIngest {
  Dataset train;
  Dataset test;
  bool standardized = false;
  Standardizer standardizer;  // identity when standardized is false
  std::vector<std::string> feature_names;
  std::string target_name;
};

/// Reads a headered CSV ('.' decimal separator, feature columns plus one
/// target column), shuffles with the seed, splits train/test by ratio, and
/// optionally z-scores features and target with statistics fitted on the
/// training split only.
/// target_column: column name, or empty to use the last column.
CsvIngest ingest_csv(const std::string& path, const std::string& target_column,
                     double split_ratio, unsigned long seed, bool standardize);

void write_dataset_csv(const std::string& path, const Dataset& data);

/// Deterministic seed derivation so independent random streams can be made
/// from one experiment seed.
unsigned long derive_seed(unsigned long base, unsigned long salt);

/// n points uniform in the box, seeded.
Matrix sample_uniform(Index n, const Box& box, unsigned long seed);

/// Evenly spaced lattice with `per_dim` points per dimension (row-major,
/// last dimension fastest), endpoints included.
Matrix lattice(Index per_dim, const Box& box);

/// Adds independent N(0, variance) noise to each entry.
Vector add_gaussian_noise(const Vector& values, double variance, unsigned long seed);

/// Draws y ~ N(0, K(X, X) + noise I) exactly via the Cholesky factor.
Vector sample_gp_targets(const Matrix& X, const Hyperparameters& hp,
                         unsigned long seed);

}  // namespace dgp
