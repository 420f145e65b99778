// Static-partition parallel for. Each worker owns a contiguous index range,
// so results never depend on the thread count.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gsc {

// thread hint 0 = GSCROWD_THREADS env var if set, else hardware concurrency.
inline unsigned resolve_thread_count(int hint) {
    if (hint > 0) return static_cast<unsigned>(hint);
    if (const char* env = std::getenv("GSCROWD_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// fn(begin, end): each worker receives one contiguous index range.
template <typename Fn>
void parallel_for_range(size_t count, int thread_hint, Fn&& fn) {
    const unsigned threads = std::min<size_t>(resolve_thread_count(thread_hint), count);
    if (threads <= 1) {
        if (count > 0) fn(size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const size_t chunk = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const size_t begin = w * chunk;
        const size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] { fn(begin, end); });
    }
    for (std::thread& t : pool) t.join();
}

template <typename Fn>
void parallel_for(size_t count, int thread_hint, Fn&& fn) {
    parallel_for_range(count, thread_hint, [&fn](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace gsc
