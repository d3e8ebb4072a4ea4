#ifndef TESTROLL_SRC_PARALLEL_HPP
#define TESTROLL_SRC_PARALLEL_HPP

#include <algorithm>
#include <thread>
#include <vector>

namespace testroll::detail {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return static_cast<int>(std::min(hw, 8u));
}

// Runs fn(begin, end, block_index) over a deterministic partition of
// [0, count) into contiguous blocks, one per worker.  Callers merge any
// per-block results in block order so numeric output does not depend on
// the worker count.  Small jobs run inline to avoid thread overhead.
template <typename Fn>
void parallel_blocks(long count, int workers, Fn&& fn) {
    if (count <= 0) return;
    int w = std::max(1, workers);
    w = static_cast<int>(std::min<long>(w, count));
    if (w == 1) {
        fn(0, count, 0);
        return;
    }
    long chunk = (count + w - 1) / w;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(w));
    for (int b = 0; b < w; ++b) {
        long lo = b * chunk;
        long hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi, b] { fn(lo, hi, b); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace testroll::detail

#endif  // TESTROLL_SRC_PARALLEL_HPP
