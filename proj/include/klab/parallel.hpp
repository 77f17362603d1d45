#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace klab {

// Process-wide worker count (CLI --threads). 0 = hardware concurrency.
inline std::atomic<int>& thread_count_ref() {
    static std::atomic<int> n{0};
    return n;
}
inline void set_thread_count(int n) { thread_count_ref().store(n); }
inline int effective_threads() {
    int n = thread_count_ref().load();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [begin, end) into contiguous chunks, one worker per chunk.  Chunk
// boundaries depend only on the range and worker count; callers that need
// byte-identical output across thread counts must write disjoint slots and
// reduce sequentially afterwards.
inline void parallel_for_chunks(std::int64_t begin, std::int64_t end,
                                const std::function<void(std::int64_t, std::int64_t)>& fn,
                                int threads = 0) {
    if (threads <= 0) threads = effective_threads();
    std::int64_t total = end - begin;
    if (total <= 0) return;
    if (threads == 1 || total < 1024) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    std::int64_t chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::int64_t lo = begin + t * chunk;
        std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

}  // namespace klab
