#pragma once

// Index-ordered parallel map. Results land in input order, so output is
// independent of thread count and completion order.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace abphase {

inline constexpr const char* thread_count_variable = "ABPHASE_THREADS";

/// Thread count from ABPHASE_THREADS, else the hardware concurrency.
inline std::size_t configured_threads() {
    if (const char* env = std::getenv(thread_count_variable)) {
        try {
            const long n = std::stol(env);
            if (n > 0) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t count, Fn&& fn, std::size_t threads = configured_threads()) {
    std::vector<Result> out(count);
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace abphase
