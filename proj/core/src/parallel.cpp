#include "saltda/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "saltda/errors.hpp"

namespace saltda {

struct Executor::Arena {
    explicit Arena(int workers) : arena(workers) {}
    tbb::task_arena arena;
};

Executor::Executor(int workers) : workers_(workers) {
    require_parameter(workers >= 1, "worker count must be >= 1");
    if (workers_ > 1) arena_ = std::make_unique<Arena>(workers_);
}

Executor::~Executor() = default;

void Executor::for_each(std::size_t count, const std::function<void(std::size_t)>& task) const {
    if (!arena_ || count < 2) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    arena_->arena.execute([&] {
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count, 1),
                          [&](const tbb::blocked_range<std::size_t>& r) {
                              for (std::size_t i = r.begin(); i != r.end(); ++i) task(i);
                          });
    });
}

}  // namespace saltda
