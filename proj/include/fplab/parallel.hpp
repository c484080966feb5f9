#pragma once
#include <cstddef>
#include <functional>

namespace fplab {

// Effective worker count: requested jobs, capped by FPLAB_MAX_JOBS if set.
// 0 means "use hardware concurrency".
std::size_t resolve_jobs(std::size_t requested);

// Runs fn(begin, end, chunk_index) over a fixed partition of [0, n) into
// `jobs` contiguous chunks, one thread per chunk. The partition depends only
// on (n, jobs); any per-item output must go to caller-owned slots so that
// results are independent of scheduling. jobs <= 1 runs inline.
void parallel_chunks(std::size_t n, std::size_t jobs,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace fplab
