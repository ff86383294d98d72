#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace spatseg {

// Runs work(0), ..., work(count-1) on up to `threads` std::threads with a
// static index partition. Each index must write only its own output slot, so
// results are bitwise identical to a serial run. If any indices throw, the
// lowest-index exception is rethrown after all threads join.
inline void parallel_for_index(int count, int threads, const std::function<void(int)>& work) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    const int nt = std::min(threads, count);
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += nt) {
                try {
                    work(i);
                } catch (...) {
                    errs[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace spatseg
