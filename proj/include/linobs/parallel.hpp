#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace linobs {

/// Run body(0..jobs-1) over a fixed pool of worker threads. Exceptions from
/// the body are captured and the first one rethrown after all workers join.
inline void parallel_for(int jobs, int workers, const std::function<void(int)>& body) {
    if (jobs <= 0) return;
    if (workers < 1) workers = 1;
    if (workers > jobs) workers = jobs;
    if (workers == 1) {
        for (int i = 0; i < jobs; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                while (true) {
                    const int i = next.fetch_add(1);
                    if (i >= jobs) break;
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace linobs
