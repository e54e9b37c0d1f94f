#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "nqw/errors.hpp"

namespace nqw::experiments {

/// A sweep point failed. `cause` holds the original exception.
class SweepFailure : public Error {
public:
    SweepFailure(std::size_t index, std::string where, std::exception_ptr cause,
                 const std::string& what)
        : Error("sweep point " + std::to_string(index) + " (" + where + ") failed: " + what),
          index_(index), cause_(std::move(cause)) {}

    std::size_t index() const noexcept { return index_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    std::size_t index_;
    std::exception_ptr cause_;
};

inline std::size_t resolve_workers(std::size_t requested) {
    if (requested != 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls job(i) for i in [0, count) on a bounded pool. Each job writes only its own output
/// slot, so results land in index order regardless of scheduling. If any job throws, the
/// lowest failing index is reported through SweepFailure; `describe(i)` names its coordinates.
template <class Job>
void parallel_for(std::size_t count, std::size_t workers, Job&& job,
                  const std::function<std::string(std::size_t)>& describe) {
    workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::vector<std::exception_ptr> errors(count);

    auto worker = [&] {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
                stop = true;
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (!errors[i]) continue;
        std::string what = "unknown error";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        throw SweepFailure(i, describe(i), errors[i], what);
    }
}

}  // namespace nqw::experiments
