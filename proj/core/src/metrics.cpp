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

#include "dgp/metrics.hpp"

#include <cmath>
#include <numbers>

namespace dgp {

double rmse(const Vector& prediction, const Vector& truth) {
  if (prediction.size() != truth.size()) {
    throw DimensionMismatch("rmse inputs have different lengths");
  }
  if (prediction.size() == 0) throw EmptyDataset("rmse of empty vectors");
  return std::sqrt((prediction - truth).squaredNorm() /
                   static_cast<double>(prediction.size()));
}

double nlpd(const GaussianPrediction& prediction, const Vector& truth,
            double noise_variance, bool add_noise) {
  if (prediction.mean.size() != truth.size()) {
    throw DimensionMismatch("nlpd inputs have different lengths");
  }
  if (truth.size() == 0) throw EmptyDataset("nlpd of empty prediction");
  double total = 0.0;
  for (Index i = 0; i < truth.size(); ++i) {
    const double s = prediction.variance(i) + (add_noise ? noise_variance : 0.0);
    const double r = truth(i) - prediction.mean(i);
    const double term =
        0.5 * (std::log(2.0 * std::numbers::pi * s) + r * r / s);
    if (!std::isfinite(term)) {
      throw NonFiniteMetric("non-finite density term at test point " +
                            std::to_string(i));
    }
    total += term;
  }
  return total / static_cast<double>(truth.size());
}

}  // namespace dgp
