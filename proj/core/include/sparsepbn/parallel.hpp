#pragma once

#include <cstddef>
#include <functional>

namespace sparsepbn {

/// Name of the environment variable capping internal worker threads.
inline constexpr const char* kThreadsEnvVar = "SPARSEPBN_NUM_THREADS";

/// Worker count: SPARSEPBN_NUM_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
int worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks write
/// disjoint outputs, so results never depend on scheduling.
void parallel_for_chunks(std::size_t n, std::size_t min_chunk,
                         const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace sparsepbn
