#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace saltda {

/// Runs index-parallel loops on a fixed number of workers.
///
/// Every task writes only to its own output slot, so results never depend on
/// the worker count; workers = 1 runs inline on the calling thread.
class Executor {
public:
    explicit Executor(int workers = 1);
    ~Executor();
    Executor(const Executor&) = delete;
    Executor& operator=(const Executor&) = delete;

    [[nodiscard]] int workers() const { return workers_; }
    void for_each(std::size_t count, const std::function<void(std::size_t)>& task) const;

private:
    int workers_;
    struct Arena;
    std::unique_ptr<Arena> arena_;
};

}  // namespace saltda
