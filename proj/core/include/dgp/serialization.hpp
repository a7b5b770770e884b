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

#include <json.hpp>

namespace dgp {

/// Hyperparameter JSON schema:
/// {
///   "lengthscales": [...],
///   "signal_variance": s,
///   "noise_variance": s,
///   "inducing_inputs": [[...], ...],   // optional
///   "kernel_family": "rbf" | "matern32"  // optional, default rbf
/// }
nlohmann::json hyperparameters_to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const nlohmann::json& j);

void save_hyperparameters(const std::string& path, const Hyperparameters& hp);
Hyperparameters load_hyperparameters(const std::string& path);

Matrix matrix_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace dgp
