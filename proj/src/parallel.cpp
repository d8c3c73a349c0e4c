#include "genmetrics/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace genmetrics {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_threads() {
    static const std::size_t value = [] {
        const char* raw = std::getenv("GENMETRICS_THREADS");
        if (raw == nullptr || *raw == '\0') return std::size_t{0};
        try {
            const long parsed = std::stol(raw);
            return parsed > 0 ? static_cast<std::size_t>(parsed) : std::size_t{0};
        } catch (const std::exception&) {
            return std::size_t{0};
        }
    }();
    return value;
}

}  // namespace

std::size_t thread_count() {
    if (const auto forced = g_override.load(); forced > 0) return forced;
    if (const auto env = env_threads(); env > 0) return env;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void set_thread_count(std::size_t threads) { g_override.store(threads); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
    if (n == 0) return;
    const std::size_t workers =
        std::min(thread_count(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk)));
    if (workers <= 1) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace genmetrics
