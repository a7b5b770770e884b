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

#include "dgp/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "dgp/numerics.hpp"

namespace dgp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    // Trim surrounding whitespace and a trailing CR from Windows files.
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string()
                         : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& text, std::size_t row, std::size_t col) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ParseError("row " + std::to_string(row) + ", column " +
                     std::to_string(col + 1) + ": cannot parse '" + text +
                     "' as a number");
  }
}

}  // namespace

Dataset Standardizer::apply(const Dataset& data) const {
  Dataset out = data;
  for (Index j = 0; j < out.X.cols(); ++j) {
    out.X.col(j) = (out.X.col(j).array() - feature_mean(j)) / feature_std(j);
  }
  out.y = (out.y.array() - target_mean) / target_std;
  return out;
}

double Standardizer::destandardize_mean(double standardized) const {
  return standardized * target_std + target_mean;
}

double Standardizer::destandardize_variance(double standardized) const {
  return standardized * target_std * target_std;
}

CsvIngest ingest_csv(const std::string& path, const std::string& target_column,
                     double split_ratio, unsigned long seed, bool standardize) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + " is empty");
  const auto header = split_line(line);
  if (header.size() < 2) {
    throw ParseError(path + ": need at least one feature column and a target");
  }

  std::size_t target_idx = header.size() - 1;
  if (!target_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), target_column);
    if (it == header.end()) {
      throw ParseError(path + ": target column '" + target_column + "' not found");
    }
    target_idx = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row_number) + " has " +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(header.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      values[c] = parse_number(fields[c], row_number, c);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw EmptyDataset(path + " has no data rows");

  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(header.size() - 1);
  Dataset all;
  all.X.resize(n, d);
  all.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    Index feature = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == target_idx) {
        all.y(i) = rows[static_cast<std::size_t>(i)][c];
      } else {
        all.X(i, feature++) = rows[static_cast<std::size_t>(i)][c];
      }
    }
  }

  if (!(split_ratio > 0.0 && split_ratio <= 1.0)) {
    throw ConfigError("split_ratio must be in (0, 1]");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const Index n_train = static_cast<Index>(split_ratio * static_cast<double>(n));
  if (n_train < 1) throw EmptyDataset("training split is empty");
  std::vector<int> train_idx(order.begin(), order.begin() + n_train);
  std::vector<int> test_idx(order.begin() + n_train, order.end());

  CsvIngest out;
  out.train = all.rows(train_idx);
  out.test = all.rows(test_idx);
  out.target_name = header[target_idx];
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_idx) out.feature_names.push_back(header[c]);
  }

  if (standardize) {
    Standardizer st;
    st.feature_mean = out.train.X.colwise().mean();
    Vector var = (out.train.X.rowwise() - st.feature_mean.transpose())
                     .array()
                     .square()
                     .colwise()
                     .mean();
    st.feature_std = var.cwiseSqrt().cwiseMax(1e-300);
    st.target_mean = out.train.y.mean();
    st.target_std = std::max(
        std::sqrt((out.train.y.array() - st.target_mean).square().mean()),
        1e-300);
    out.standardizer = st;
    out.standardized = true;
    out.train = st.apply(out.train);
    if (out.test.size() > 0) out.test = st.apply(out.test);
  } else {
    out.standardizer.feature_mean = Vector::Zero(d);
    out.standardizer.feature_std = Vector::Ones(d);
  }
  return out;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  data.check_consistent();
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (Index j = 0; j < data.dim(); ++j) out << 'x' << j << ',';
  out << "y\n";
  out << std::setprecision(17);
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) out << data.X(i, j) << ',';
    out << data.y(i) << '\n';
  }
}

unsigned long derive_seed(unsigned long base, unsigned long salt) {
  // splitmix64 step over the combined value.
  unsigned long long z = static_cast<unsigned long long>(base) +
                         0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return static_cast<unsigned long>(z ^ (z >> 31));
}

Matrix sample_uniform(Index n, const Box& box, unsigned long seed) {
  std::mt19937_64 rng(seed);
  Matrix X(n, static_cast<Index>(box.size()));
  for (Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < box.size(); ++j) {
      std::uniform_real_distribution<double> u(box[j].first, box[j].second);
      X(i, static_cast<Index>(j)) = u(rng);
    }
  }
  return X;
}

Matrix lattice(Index per_dim, const Box& box) {
  if (per_dim < 1) throw ConfigError("lattice needs at least one point per axis");
  const Index d = static_cast<Index>(box.size());
  Index total = 1;
  for (Index j = 0; j < d; ++j) total *= per_dim;
  Matrix X(total, d);
  std::vector<Index> odometer(static_cast<std::size_t>(d), 0);
  for (Index row = 0; row < total; ++row) {
    for (Index j = 0; j < d; ++j) {
      const auto& [lo, hi] = box[static_cast<std::size_t>(j)];
      const double t = per_dim == 1 ? 0.5
                                    : static_cast<double>(odometer[j]) /
                                          static_cast<double>(per_dim - 1);
      X(row, j) = lo + (hi - lo) * t;
    }
    for (Index j = d - 1; j >= 0; --j) {
      if (++odometer[j] < per_dim) break;
      odometer[j] = 0;
    }
  }
  return X;
}

Vector add_gaussian_noise(const Vector& values, double variance, unsigned long seed) {
  if (variance < 0.0) throw ConfigError("noise variance must be >= 0");
  if (variance == 0.0) return values;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Vector out = values;
  for (Index i = 0; i < out.size(); ++i) out(i) += normal(rng);
  return out;
}

Vector sample_gp_targets(const Matrix& X, const Hyperparameters& hp,
                         unsigned long seed) {
  hp.validate(X.cols());
  Matrix ky = kernel_matrix(hp.kernel, X, X);
  ky.diagonal().array() += hp.noise_variance;
  SpdFactor factor = cholesky_jittered(ky);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector xi(X.rows());
  for (Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
  return factor.lower * xi;
}

}  // namespace dgp
