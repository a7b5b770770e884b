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

#include <cstddef>
#include <functional>

namespace dgp {

/// Sets the worker count used by parallel_for. 0 picks
/// std::thread::hardware_concurrency(). 1 runs everything inline.
void set_worker_count(int workers);
int worker_count();

/// Runs fn(i) for every i in [0, count). Tasks must be independent and write
/// disjoint outputs; results are then schedule-independent. Exceptions thrown
/// by tasks are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace dgp
