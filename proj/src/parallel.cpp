#include "cadsynth/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cadsynth {

namespace {

int default_thread_count() {
    if (const char *env = std::getenv("CADSYNTH_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<int> g_threads{0};
thread_local bool t_inside_worker = false;

}  // namespace

int thread_count() {
    int n = g_threads.load();
    if (n == 0) {
        n = default_thread_count();
        g_threads.store(n);
    }
    return n;
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

void parallel_for(int begin, int end, const std::function<void(int)> &body, int grain) {
    if (end <= begin) return;
    grain = std::max(1, grain);
    const int chunks = (end - begin + grain - 1) / grain;
    const int workers = t_inside_worker ? 1 : std::min(thread_count(), chunks);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        t_inside_worker = true;
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= chunks) break;
            const int lo = begin + c * grain;
            const int hi = std::min(end, lo + grain);
            try {
                for (int i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(chunks);
            }
        }
        t_inside_worker = false;
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (int w = 1; w < workers; ++w) pool.emplace_back(run);
        run();
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace cadsynth
