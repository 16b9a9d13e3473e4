#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace coxnet {

// COXNET_THREADS caps worker threads; 0 or unset means auto.
inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("COXNET_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

namespace detail {
inline bool& inside_parallel() {
    static thread_local bool v = false;
    return v;
}
}

// Runs body(i) for i in [0, count). Callers must write results into
// per-index slots so the output is independent of scheduling. Nested calls
// degrade to serial execution.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
    bool& inside = detail::inside_parallel();
    std::size_t workers = inside ? 1 : std::min<std::size_t>(thread_budget(), count);
    if (workers <= 1) {
        bool saved = inside;
        inside = true;
        for (std::size_t i = 0; i < count; ++i) body(i);
        inside = saved;
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        detail::inside_parallel() = true;
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}
