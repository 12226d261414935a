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


#include "psc/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace psc {

namespace {
std::atomic<int> g_override{0};
}

int default_worker_count() {
    if (int w = g_override.load(); w > 0) return w;
    if (const char *env = std::getenv("PSC_THREADS")) {
        try {
            int w = std::stoi(env);
            if (w > 0) return w;
        } catch (const std::exception &) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_worker_count(int workers) { g_override.store(std::max(0, workers)); }

void parallel_for(size_t n, const std::function<void(size_t)> &fn, int workers) {
    if (workers <= 0) workers = default_worker_count();
    const size_t w = std::min<size_t>(static_cast<size_t>(workers), n);
    if (w <= 1) {
        for (size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (size_t k = next++; k < n; k = next++) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (size_t t = 0; t < w; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace psc
