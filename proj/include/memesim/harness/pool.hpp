#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace memesim::harness {

/// Runs task(i) for i in [0, count) on `jobs` threads and returns the
/// results in index order, so output never depends on scheduling. The first
/// exception thrown by any task is rethrown after all workers stop.
template <class Result>
std::vector<Result> parallel_map(std::size_t count, std::size_t jobs, const std::function<Result(std::size_t)>& task)
{
    std::vector<Result> results(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load())
                return;
            try {
                results[i] = task(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error)
                    error = std::current_exception();
                failed = true;
            }
        }
    };

    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(jobs);
        for (std::size_t t = 0; t < jobs; ++t)
            threads.emplace_back(worker);
    }
    if (error)
        std::rethrow_exception(error);
    return results;
}

} // namespace memesim::harness
