#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace noperr {

// 0 -> NOPERR_THREADS if set, else the hardware concurrency
unsigned resolve_threads(unsigned requested);

// Runs f(i) for i in [0, count). Work is handed out by index, each index
// writes only its own slot, so results never depend on the thread count.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
    unsigned t = resolve_threads(threads);
    if (t <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < std::min<std::size_t>(t, count); ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace noperr
