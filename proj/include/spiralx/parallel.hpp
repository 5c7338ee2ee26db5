#ifndef SPIRALX_PARALLEL_HPP
#define SPIRALX_PARALLEL_HPP

#include <atomic>
#include <thread>
#include <vector>

namespace spiralx {

/// Runs fn(i) for i in [0, n). With threads > 1 the calls are distributed
/// over workers; fn must only write to per-index slots so results are
/// identical to the sequential order regardless of scheduling. Reductions
/// over the slots happen after this returns, in index order.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, n);
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace spiralx

#endif
