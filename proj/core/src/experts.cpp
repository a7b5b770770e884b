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

#include "dgp/experts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>

#include "dgp/exact_gp.hpp"
#include "dgp/parallel.hpp"
#include "dgp/svgp.hpp"

namespace dgp {

namespace {

/// Maps Hyperparameters onto a flat optimization vector: log of each positive
/// hyperparameter, then raw inducing coordinates when those are trained.
struct ParamSpace {
  Hyperparameters reference;
  bool train_inducing = false;

  Index positive_count() const { return reference.dim() + 2; }
  Index inducing_count() const {
    return train_inducing && reference.inducing_inputs
               ? reference.inducing_inputs->size()
               : 0;
  }
  Index size() const { return positive_count() + inducing_count(); }

  Vector pack(const Hyperparameters& hp) const {
    Vector p(size());
    const Index d = hp.dim();
    for (Index i = 0; i < d; ++i) p(i) = std::log(hp.kernel.lengthscales(i));
    p(d) = std::log(hp.kernel.signal_variance);
    p(d + 1) = std::log(hp.noise_variance);
    if (inducing_count() > 0) {
      const Matrix& z = *hp.inducing_inputs;
      Index k = positive_count();
      for (Index i = 0; i < z.rows(); ++i)
        for (Index j = 0; j < z.cols(); ++j) p(k++) = z(i, j);
    }
    return p;
  }

  Hyperparameters unpack(const Vector& p) const {
    Hyperparameters hp = reference;
    const Index d = hp.dim();
    for (Index i = 0; i < d; ++i) hp.kernel.lengthscales(i) = std::exp(p(i));
    hp.kernel.signal_variance = std::exp(p(d));
    hp.noise_variance = std::exp(p(d + 1));
    if (inducing_count() > 0) {
      Matrix& z = *hp.inducing_inputs;
      Index k = positive_count();
      for (Index i = 0; i < z.rows(); ++i)
        for (Index j = 0; j < z.cols(); ++j) z(i, j) = p(k++);
    }
    return hp;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (Index i = 0; i < reference.dim(); ++i)
      out.push_back("lengthscale_" + std::to_string(i));
    out.push_back("signal_variance");
    out.push_back("noise_variance");
    if (inducing_count() > 0) {
      const Matrix& z = *reference.inducing_inputs;
      for (Index i = 0; i < z.rows(); ++i)
        for (Index j = 0; j < z.cols(); ++j)
          out.push_back("z_" + std::to_string(i) + "_" + std::to_string(j));
    }
    return out;
  }

  /// Raw (exponentiated) values for the trace.
  Vector raw_values(const Vector& p) const {
    Vector out = p;
    for (Index i = 0; i < positive_count(); ++i) out(i) = std::exp(p(i));
    return out;
  }
};

double exact_lml_value(const Dataset& shard, const Hyperparameters& hp) {
  return log_marginal_likelihood(ExactGpModel::fit(shard, hp));
}

/// Ascent gradient of the local objective in optimization (log) space.
Vector local_gradient(const Dataset& shard, const ParamSpace& space,
                      const Vector& p, TrainObjective objective, double* value) {
  Hyperparameters hp = space.unpack(p);
  if (objective == TrainObjective::ExactLml) {
    ExactGpModel model = ExactGpModel::fit(shard, hp);
    if (value) *value = log_marginal_likelihood(model);
    Vector grad(space.size());
    const auto selectors = all_param_selectors(hp.dim());
    const bool analytic = hp.kernel.family == KernelFamily::RBF;
    for (std::size_t s = 0; s < selectors.size(); ++s) {
      const Index i = static_cast<Index>(s);
      const bool lengthscale =
          selectors[s].kind == ParamSelector::Kind::Lengthscale;
      if (analytic || !lengthscale) {
        // d/d log(theta) = theta * d/d theta; theta = exp(p_i).
        grad(i) = std::exp(p(i)) * lml_gradient(model, selectors[s]);
      } else {
        // Matern lengthscales: central differences in log space.
        const double h = 1e-5;
        Vector pp = p;
        pp(i) = p(i) + h;
        const double up = exact_lml_value(shard, space.unpack(pp));
        pp(i) = p(i) - h;
        const double down = exact_lml_value(shard, space.unpack(pp));
        grad(i) = (up - down) / (2.0 * h);
      }
    }
    return grad;
  }

  SvgpModel model = SvgpModel::fit(shard, hp);
  if (value) *value = elbo(model);
  SvgpParamSet set;
  set.inducing_inputs = space.train_inducing;
  Vector raw = elbo_gradient(model, set);
  Vector grad = raw;
  for (Index i = 0; i < space.positive_count(); ++i) grad(i) *= std::exp(p(i));
  return grad;
}

/// Adam ascent step (maximizes the objective).
struct AdamState {
  Vector m, v;
  long t = 0;

  explicit AdamState(Index size) : m(Vector::Zero(size)), v(Vector::Zero(size)) {}

  void step(Vector& p, const Vector& ascent_grad, const TrainConfig& config) {
    ++t;
    const auto [beta1, beta2] = config.adam_betas;
    m = beta1 * m + (1.0 - beta1) * ascent_grad;
    v = beta2 * v + (1.0 - beta2) * ascent_grad.cwiseProduct(ascent_grad).eval();
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    Vector mhat = m / c1;
    Vector vhat = v / c2;
    p += config.learning_rate *
         (mhat.array() / (vhat.array().sqrt() + config.adam_epsilon)).matrix();
  }
};

void check_finite(const Vector& p, int round) {
  if (!p.allFinite()) {
    throw DivergedError("parameters became non-finite at round " +
                        std::to_string(round));
  }
}

void append_trace(std::vector<TraceEntry>& trace, int round,
                  const std::vector<std::string>& names, const Vector& raw) {
  for (Index i = 0; i < raw.size(); ++i) {
    trace.push_back({round, names[static_cast<std::size_t>(i)], raw(i)});
  }
}

std::vector<Dataset> extract_shards(const Dataset& data, const Partition& partition) {
  std::vector<Dataset> shards;
  shards.reserve(partition.shards.size());
  for (const auto& idx : partition.shards) shards.push_back(data.rows(idx));
  return shards;
}

}  // namespace

Index Partition::total_size() const {
  Index n = 0;
  for (const auto& shard : shards) n += static_cast<Index>(shard.size());
  return n;
}

Partition partition_dataset(const Dataset& data, int experts,
                            PartitionStrategy strategy, unsigned long seed) {
  data.check_consistent();
  const Index n = data.size();
  if (experts < 1) throw ConfigError("expert count must be >= 1");
  if (static_cast<Index>(experts) > n) {
    throw TooManyExperts("cannot split " + std::to_string(n) + " samples into " +
                         std::to_string(experts) + " experts");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (strategy == PartitionStrategy::Random) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  Partition partition;
  partition.strategy = strategy;
  partition.seed = seed;
  const Index base = n / experts;
  const Index remainder = n % experts;
  std::size_t cursor = 0;
  for (int i = 0; i < experts; ++i) {
    const Index size = base + (static_cast<Index>(i) < remainder ? 1 : 0);
    partition.shards.emplace_back(order.begin() + static_cast<long>(cursor),
                                  order.begin() + static_cast<long>(cursor) +
                                      static_cast<long>(size));
    cursor += static_cast<std::size_t>(size);
  }
  return partition;
}

CentralSubset select_central_subset(const Partition& partition, unsigned long seed) {
  std::mt19937_64 rng(seed);
  CentralSubset central;
  central.indices.reserve(partition.shards.size());
  for (const auto& shard : partition.shards) {
    if (shard.empty()) throw EmptyDataset("partition contains an empty shard");
    std::uniform_int_distribution<std::size_t> pick(0, shard.size() - 1);
    central.indices.push_back(shard[pick(rng)]);
  }
  return central;
}

void TrainConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (local_steps_per_round < 1) {
    throw ConfigError("local_steps_per_round must be >= 1");
  }
  if (iterations % local_steps_per_round != 0) {
    throw ConfigError("iterations must be divisible by local_steps_per_round");
  }
}

FactEvaluation fact_objective(const Dataset& data, const Partition& partition,
                              const Hyperparameters& hp) {
  hp.validate(data.dim());
  const std::size_t experts = partition.shards.size();
  const auto selectors = all_param_selectors(hp.dim());

  std::vector<double> values(experts, 0.0);
  std::vector<Vector> gradients(experts);
  std::vector<Dataset> shards = extract_shards(data, partition);

  parallel_for(experts, [&](std::size_t i) {
    ExactGpModel model = ExactGpModel::fit(shards[i], hp);
    values[i] = log_marginal_likelihood(model);
    gradients[i] = lml_gradient(model, selectors);
  });

  FactEvaluation result;
  result.gradient = Vector::Zero(static_cast<Index>(selectors.size()));
  for (std::size_t i = 0; i < experts; ++i) {
    result.value += values[i];
    result.gradient += gradients[i];
  }
  for (const auto& s : selectors) result.parameter_names.push_back(s.name());
  return result;
}

TrainResult fedavg_train(const Dataset& data, const Partition& partition,
                         const Hyperparameters& initial, const TrainConfig& config,
                         TrainObjective objective) {
  config.validate();
  initial.validate(data.dim());
  if (objective == TrainObjective::SvgpElbo && !initial.inducing_inputs) {
    throw ConfigError("SVGP training requires inducing inputs");
  }

  ParamSpace space{initial, config.train_inducing &&
                                objective == TrainObjective::SvgpElbo};
  const std::size_t experts = partition.shards.size();
  std::vector<Dataset> shards = extract_shards(data, partition);

  Vector global = space.pack(initial);
  std::vector<AdamState> states(experts, AdamState(space.size()));
  std::vector<Vector> locals(experts, global);

  TrainResult result;
  result.rounds = config.iterations / config.local_steps_per_round;
  const auto names = space.names();

  for (int round = 1; round <= result.rounds; ++round) {
    parallel_for(experts, [&](std::size_t i) {
      Vector p = global;
      for (int s = 0; s < config.local_steps_per_round; ++s) {
        Vector grad = local_gradient(shards[i], space, p, objective, nullptr);
        states[i].step(p, grad, config);
      }
      locals[i] = p;
    });

    Vector mean = Vector::Zero(space.size());
    for (const auto& p : locals) mean += p;
    mean /= static_cast<double>(experts);
    for (const auto& p : locals) {
      result.max_expert_spread =
          std::max(result.max_expert_spread, (p - mean).cwiseAbs().maxCoeff());
    }
    global = mean;
    check_finite(global, round);
    append_trace(result.trace, round, names, space.raw_values(global));
  }

  result.hyperparameters = space.unpack(global);
  return result;
}

TrainResult fact_train(const Dataset& data, const Partition& partition,
                       const Hyperparameters& initial, const TrainConfig& config,
                       TrainObjective objective) {
  config.validate();
  initial.validate(data.dim());
  if (objective == TrainObjective::SvgpElbo && !initial.inducing_inputs) {
    throw ConfigError("SVGP training requires inducing inputs");
  }

  ParamSpace space{initial, config.train_inducing &&
                                objective == TrainObjective::SvgpElbo};
  const std::size_t experts = partition.shards.size();
  std::vector<Dataset> shards = extract_shards(data, partition);

  Vector p = space.pack(initial);
  AdamState state(space.size());
  TrainResult result;
  result.rounds = config.iterations;
  const auto names = space.names();

  std::vector<Vector> shard_grads(experts);
  for (int round = 1; round <= config.iterations; ++round) {
    parallel_for(experts, [&](std::size_t i) {
      shard_grads[i] = local_gradient(shards[i], space, p, objective, nullptr);
    });
    Vector grad = Vector::Zero(space.size());
    for (const auto& g : shard_grads) grad += g;
    state.step(p, grad, config);
    check_finite(p, round);
    append_trace(result.trace, round, names, space.raw_values(p));
  }

  result.hyperparameters = space.unpack(p);
  return result;
}

TrainResult train_distributed(const Dataset& data, const Partition& partition,
                              const Hyperparameters& initial,
                              const TrainConfig& config, TrainObjective objective) {
  return config.method == TrainMethod::FedAvg
             ? fedavg_train(data, partition, initial, config, objective)
             : fact_train(data, partition, initial, config, objective);
}

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open trace file for writing: " + path);
  out << "round,parameter,value\n";
  out << std::setprecision(17);
  for (const auto& entry : trace) {
    out << entry.round << ',' << entry.parameter << ',' << entry.value << '\n';
  }
}

}  // namespace dgp
