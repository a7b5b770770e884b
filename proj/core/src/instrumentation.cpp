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

#include "dgp/instrumentation.hpp"

#include <atomic>
#include <mutex>

namespace dgp {

namespace {
std::atomic<bool> g_tracking{false};
std::mutex g_mutex;
std::vector<AllocationRecord> g_records;
}  // namespace

void start_allocation_tracking() {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_records.clear();
  g_tracking.store(true);
}

std::vector<AllocationRecord> stop_allocation_tracking() {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_tracking.store(false);
  std::vector<AllocationRecord> out;
  out.swap(g_records);
  return out;
}

void note_allocation(long rows, long cols, const char* tag) {
  if (!g_tracking.load(std::memory_order_relaxed)) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  if (!g_tracking.load()) return;
  g_records.push_back({rows, cols, tag});
}

}  // namespace dgp
