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

#include "dgp/types.hpp"

namespace dgp {

/// Root mean squared error between predictions and ground truth.
double rmse(const Vector& prediction, const Vector& truth);

/// Mean negative log predictive density of the targets under the Gaussian
/// prediction. When add_noise is set the density is observation-level:
/// variance + noise_variance; aggregators whose variance already includes
/// the noise pass add_noise = false. Throws NonFiniteMetric when any term is
/// non-finite (e.g. a zero predictive variance).
double nlpd(const GaussianPrediction& prediction, const Vector& truth,
            double noise_variance, bool add_noise = true);

}  // namespace dgp
