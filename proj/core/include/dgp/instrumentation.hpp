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

#include <string>
#include <vector>

namespace dgp {

/// Size of one dense matrix materialized by a numerics or kernel routine.
/// Used by structural complexity tests: enabling tracking lets a test assert
/// which matrix shapes a code path allocates, without timing anything.
struct AllocationRecord {
  long rows = 0;
  long cols = 0;
  std::string tag;
};

/// Starts recording allocation notes. Off by default; recording costs one
/// mutex lock per noted allocation, so leave it off outside tests.
void start_allocation_tracking();

/// Stops recording and returns everything noted since the matching start.
std::vector<AllocationRecord> stop_allocation_tracking();

/// Records one matrix materialization if tracking is active.
void note_allocation(long rows, long cols, const char* tag);

}  // namespace dgp
