#include "maxlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace maxlab {

namespace {

int threads_from_env() {
    const char* env = std::getenv("MAXLAB_THREADS");
    int n = 0;
    if (env != nullptr) n = std::atoi(env);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, n);
}

std::atomic<int>& thread_setting() {
    static std::atomic<int> n{threads_from_env()};
    return n;
}

thread_local bool t_inside_worker = false;

} // namespace

int max_threads() { return thread_setting().load(); }

void set_max_threads(int n) { thread_setting().store(n > 0 ? n : threads_from_env()); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int workers = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(max_threads())));
    if (workers <= 1 || t_inside_worker) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        t_inside_worker = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
        t_inside_worker = false;
    };
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace maxlab
