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

#include "dgp/test_functions.hpp"

#include <cmath>

namespace dgp {

Vector ackley(const Matrix& X, double a, double b, double c) {
  const double d = static_cast<double>(X.cols());
  Vector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    const double sq = X.row(i).squaredNorm() / d;
    double cos_sum = 0.0;
    for (Index j = 0; j < X.cols(); ++j) cos_sum += std::cos(c * X(i, j));
    out(i) = -a * std::exp(-b * std::sqrt(sq)) - std::exp(cos_sum / d) + a +
             std::exp(1.0);
  }
  return out;
}

Vector griewank(const Matrix& X) {
  Vector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    double quad = 0.0;
    double prod = 1.0;
    for (Index j = 0; j < X.cols(); ++j) {
      quad += X(i, j) * X(i, j);
      prod *= std::cos(X(i, j) / std::sqrt(static_cast<double>(j + 1)));
    }
    out(i) = 1.0 + quad / 4000.0 - prod;
  }
  return out;
}

}  // namespace dgp
