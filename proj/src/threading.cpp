#include "kpz/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace kpz {

std::size_t thread_budget() {
    std::size_t budget = std::thread::hardware_concurrency();
    if (budget == 0)
        budget = 1;
    if (const char* env = std::getenv("KPZLDP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256)
            budget = std::min<std::size_t>(budget, static_cast<std::size_t>(v));
        else if (v != 0)
            budget = 1; // unusable cap: stay serial rather than guessing
    }
    return budget;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load())
                    return;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace kpz
