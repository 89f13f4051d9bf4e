#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace league::parallel {

// Applies fn to every index in [0, n) with at most `max_concurrent` workers.
// Results land by index so callers stay order-deterministic; the first
// exception wins and is rethrown after all workers drain.
template <typename Fn>
void for_each_index(size_t n, int max_concurrent, Fn&& fn) {
    if (n == 0) return;
    size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, max_concurrent)));
    if (workers == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::mutex mu;
    size_t next = 0;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (true) {
            size_t index;
            {
                std::lock_guard lock(mu);
                if (next >= n || first_error) return;
                index = next++;
            }
            try {
                fn(index);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace league::parallel
