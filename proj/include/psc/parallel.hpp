// Copyright 2026 The psc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef PSC_PARALLEL_HPP
#define PSC_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace psc {

/// Worker count from PSC_THREADS, falling back to the hardware concurrency.
int default_worker_count();

/// Overrides default_worker_count() for the current process (0 restores the
/// environment-derived value).
void set_worker_count(int workers);

/// Calls fn(k) for k in [0, n) on up to `workers` threads. Work items must be
/// independent; results written by index are identical for any worker count.
/// The first exception thrown by a work item is rethrown after all threads join.
void parallel_for(size_t n, const std::function<void(size_t)> &fn, int workers = 0);

template <class T, class F>
std::vector<T> parallel_map(size_t n, F fn, int workers = 0) {
    std::vector<T> out(n);
    parallel_for(n, [&](size_t k) { out[k] = fn(k); }, workers);
    return out;
}

}  // namespace psc

#endif  // PSC_PARALLEL_HPP
