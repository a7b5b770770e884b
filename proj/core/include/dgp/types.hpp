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

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class UnsupportedParam : public Error {
 public:
  using Error::Error;
};

class TooManyExperts : public Error {
 public:
  using Error::Error;
};

class TooFewExperts : public Error {
 public:
  using Error::Error;
};

class DivergedError : public Error {
 public:
  using Error::Error;
};

class OverflowGuard : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

class NonFiniteMetric : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when a prediction fails a sanity check (e.g. too many clamped
/// variances) rather than a numerical routine.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Input matrix plus target vector. Rows of X are observations.
struct Dataset {
  Matrix X;  // n x d
  Vector y;  // n

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }

  /// Extracts the rows listed in `indices` (in that order).
  Dataset rows(const std::vector<int>& indices) const {
    Dataset out;
    out.X.resize(static_cast<Index>(indices.size()), X.cols());
    out.y.resize(static_cast<Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      out.X.row(static_cast<Index>(i)) = X.row(indices[i]);
      out.y(static_cast<Index>(i)) = y(indices[i]);
    }
    return out;
  }

  void check_consistent() const {
    if (X.rows() != y.size()) {
      throw DimensionMismatch("dataset has " + std::to_string(X.rows()) +
                              " input rows but " + std::to_string(y.size()) +
                              " targets");
    }
  }
};

/// Per-test-point Gaussian predictive distribution.
///
/// `variance` is entrywise >= 0; negative values produced by subtractive
/// formulas are clamped to zero and counted in `clamped_variances`.
/// Aggregation rules that can produce non-positive precisions (rBCM) clamp
/// those to the prior precision and count them in `clamped_precisions`.
struct GaussianPrediction {
  Vector mean;
  Vector variance;
  std::optional<Matrix> covariance;
  int clamped_variances = 0;
  int clamped_precisions = 0;

  Index size() const { return mean.size(); }
};

}  // namespace dgp
