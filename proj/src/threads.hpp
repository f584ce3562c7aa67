#ifndef ROTVEC_THREADS_HPP
#define ROTVEC_THREADS_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rotvec {

inline int thread_budget(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ROTVEC_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Static block partition; results must be written to disjoint slots so the
// outcome is independent of the thread count.
inline void parallel_for(long n, int threads, const std::function<void(long)>& body) {
    threads = std::min<long>(threads, n);
    if (threads <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const long lo = n * t / threads;
        const long hi = n * (t + 1) / threads;
        pool.emplace_back([lo, hi, &body] {
            for (long i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace rotvec

#endif
