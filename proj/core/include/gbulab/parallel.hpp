#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gbulab {

/// Runs job(k) for k in [0, count) on up to `jobs` worker threads.
/// Each job owns its slot of the result; the first exception is rethrown.
template <typename Job>
void parallel_for(std::size_t count, std::size_t jobs, Job&& job) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t k = 0; k < count; ++k) job(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    job(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace gbulab
