#ifndef MEANPER_PARALLEL_HPP
#define MEANPER_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace meanper {

/// Worker count: MEANPER_THREADS caps it when set, hardware otherwise.
inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MEANPER_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            n = std::min<unsigned>(n, static_cast<unsigned>(v));
        }
    }
    return n;
}

/// Index-parallel map over [0, count); results land at fixed indices so the
/// outcome does not depend on the schedule.
template <class Fn> void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace meanper

#endif
