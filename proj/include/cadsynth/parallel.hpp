#pragma once

#include <functional>

namespace cadsynth {

/// Worker count used by parallel_for. Defaults to CADSYNTH_THREADS if set, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for every i in [begin, end). Work is handed out dynamically in chunks of `grain`.
/// Nested calls from inside a worker run serially. The first exception thrown by any body is rethrown.
void parallel_for(int begin, int end, const std::function<void(int)> &body, int grain = 1);

/// RAII override of the worker count.
class ScopedThreadCount {
public:
    explicit ScopedThreadCount(int n) : previous_(thread_count()) { set_thread_count(n); }
    ~ScopedThreadCount() { set_thread_count(previous_); }
    ScopedThreadCount(const ScopedThreadCount &) = delete;
    ScopedThreadCount &operator=(const ScopedThreadCount &) = delete;

private:
    int previous_;
};

}  // namespace cadsynth
