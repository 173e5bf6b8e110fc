#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ecado {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
// owned by exactly one call, so callers write results into pre-sized slots
// and reduce afterwards in index order. The first exception is rethrown.
template <class Fn>
void parallel_for(int workers, std::size_t count, Fn&& fn) {
    const std::size_t w = std::min<std::size_t>(std::max(workers, 1), count);
    if (w <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
        pool.emplace_back([&, k] {
            for (std::size_t i = k; i < count; i += w) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace ecado
