// parallel.hpp - deterministic index-parallel loop over std::thread
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oamsim {

inline std::atomic<unsigned>& worker_limit() {
    static std::atomic<unsigned> limit{std::max(1u, std::thread::hardware_concurrency())};
    return limit;
}

inline void set_worker_count(unsigned n) { worker_limit() = std::max(1u, n); }

// fn(i) for i in [0, n). Each index writes only its own slot, so results never
// depend on the worker count. The first exception (lowest index) is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(worker_limit().load(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::size_t err_idx = n;
    std::exception_ptr err;
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (i < err_idx) {
                    err_idx = i;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    pool.clear();
    if (err) std::rethrow_exception(err);
}

}  // namespace oamsim
