#include "fplab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fplab {

std::size_t resolve_jobs(std::size_t requested) {
    std::size_t jobs = requested;
    if (jobs == 0) {
        unsigned hc = std::thread::hardware_concurrency();
        jobs = hc == 0 ? 1 : hc;
    }
    if (const char* cap = std::getenv("FPLAB_MAX_JOBS")) {
        try {
            const long v = std::stol(cap);
            if (v >= 1) jobs = std::min<std::size_t>(jobs, static_cast<std::size_t>(v));
        } catch (...) {
            // ignore unparsable cap
        }
    }
    return std::max<std::size_t>(jobs, 1);
}

void parallel_chunks(std::size_t n, std::size_t jobs,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    jobs = std::min(std::max<std::size_t>(jobs, 1), n);
    if (jobs == 1) {
        fn(0, n, 0);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (std::size_t c = 0; c < jobs; ++c) {
        const std::size_t b = c * n / jobs, e = (c + 1) * n / jobs;
        threads.emplace_back([&fn, b, e, c] { fn(b, e, c); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace fplab
