#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace growthlab {

/// Effective worker count: `requested` if positive, otherwise the
/// hardware concurrency; both capped by the GROWTHLAB_THREADS env var.
int effective_threads(int requested);

/// Runs f(i) for i in [0, n) across workers. Work is assigned by static
/// index stripes and results must be written to per-index slots, so the
/// outcome is identical for every thread count.
template <typename F>
void parallel_for_index(std::uint64_t n, int threads, F&& f) {
    if (threads <= 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) f(i);
        return;
    }
    const int workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::uint64_t i = static_cast<std::uint64_t>(w); i < n;
                 i += static_cast<std::uint64_t>(workers)) {
                f(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace growthlab
