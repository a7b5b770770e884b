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
#include "dgp/types.hpp"

#include <utility>

namespace dgp {

enum class PartitionStrategy { Random, Contiguous };

/// Disjoint index shards covering a dataset, one per expert.
struct Partition {
  std::vector<std::vector<int>> shards;
  PartitionStrategy strategy = PartitionStrategy::Random;
  unsigned long seed = 0;

  int expert_count() const { return static_cast<int>(shards.size()); }
  Index total_size() const;
};

/// Splits [0, n) into `experts` shards whose sizes differ by at most one.
/// Random shuffles the indices with the seed first; Contiguous keeps order.
Partition partition_dataset(const Dataset& data, int experts,
                            PartitionStrategy strategy, unsigned long seed);

/// One training index drawn from each shard (so n_c equals the expert count).
struct CentralSubset {
  std::vector<int> indices;
};

CentralSubset select_central_subset(const Partition& partition, unsigned long seed);

enum class TrainMethod { Fact, FedAvg };
enum class TrainObjective { ExactLml, SvgpElbo };

struct TrainConfig {
  TrainMethod method = TrainMethod::FedAvg;
  int iterations = 100;
  double learning_rate = 0.1;
  std::pair<double, double> adam_betas{0.9, 0.999};
  double adam_epsilon = 1e-8;
  unsigned long seed = 0;
  int local_steps_per_round = 1;  // FedAvg; must divide iterations
  bool train_inducing = false;    // SVGP only: also optimize Z entries

  void validate() const;
};

/// Sum of the per-shard log-marginal likelihoods, with the gradient as the
/// sum of the per-shard analytic gradients (raw parameters, ordered per
/// all_param_selectors). Shard terms are evaluated in parallel.
struct FactEvaluation {
  double value = 0.0;
  Vector gradient;
  std::vector<std::string> parameter_names;
};

FactEvaluation fact_objective(const Dataset& data, const Partition& partition,
                              const Hyperparameters& hp);

struct TraceEntry {
  int round = 0;
  std::string parameter;
  double value = 0.0;
};

struct TrainResult {
  Hyperparameters hyperparameters;
  std::vector<TraceEntry> trace;  // one entry per (round, parameter)
  int rounds = 0;
  /// Largest |local - mean| across experts and parameters seen at any
  /// averaging step (log-space). Zero when all experts stay in lockstep.
  double max_expert_spread = 0.0;
};

/// Round-based federated averaging: every round each expert runs
/// local_steps_per_round Adam steps on its local objective, then the server
/// averages the parameter vectors arithmetically. Positive hyperparameters
/// are optimized (and averaged) in log space; inducing coordinates, when
/// trained, stay raw. Deterministic for a fixed config.
/// Throws DivergedError when any parameter becomes non-finite.
TrainResult fedavg_train(const Dataset& data, const Partition& partition,
                         const Hyperparameters& initial, const TrainConfig& config,
                         TrainObjective objective);

/// Centralized Adam on the factorized objective (sum of local terms); one
/// trace round per iteration.
TrainResult fact_train(const Dataset& data, const Partition& partition,
                       const Hyperparameters& initial, const TrainConfig& config,
                       TrainObjective objective);

/// Dispatches on config.method.
TrainResult train_distributed(const Dataset& data, const Partition& partition,
                              const Hyperparameters& initial,
                              const TrainConfig& config, TrainObjective objective);

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace);

}  // namespace dgp
