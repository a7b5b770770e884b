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

/// Ackley function, one value per row of X.
/// f(x) = -a exp(-b sqrt(mean x_i^2)) - exp(mean cos(c x_i)) + a + e
Vector ackley(const Matrix& X, double a = 20.0, double b = 0.2,
              double c = 2.0 * 3.14159265358979323846);

/// Griewank function: f(x) = 1 + sum x_i^2 / 4000 - prod cos(x_i / sqrt(i)).
Vector griewank(const Matrix& X);

}  // namespace dgp
