#ifndef EFFHAM_PARALLEL_HPP
#define EFFHAM_PARALLEL_HPP

#include <cstdlib>
#include <thread>
#include <vector>

namespace effham {

// Worker cap from EFFHAM_THREADS; 0 or unset means hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("EFFHAM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers
// write results into disjoint slots so the outcome does not depend on the
// scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t stride = static_cast<std::size_t>(workers);
    std::vector<std::thread> pool;
    pool.reserve(stride);
    for (std::size_t w = 0; w < stride; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += stride) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace effham

#endif
