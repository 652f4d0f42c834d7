#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace tpflow {

/// Worker count from TPFLOW_THREADS (default 1; results are identical for
/// any value because tasks write disjoint slots and reductions stay serial).
inline int thread_count() {
    if (const char* env = std::getenv("TPFLOW_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

/// Run fn(i) for i in [0, n) on up to thread_count() workers with a static
/// block partition (deterministic assignment).
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(thread_count(), n > 0 ? n : 1);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([=, &fn]() {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace tpflow
