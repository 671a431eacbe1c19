#ifndef HIPPA_PARALLEL_HPP
#define HIPPA_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace hippa {

/// Worker count from HIPPA_WORKERS, else the hardware concurrency (at least 1).
/// Throws std::invalid_argument if the variable is set but not a positive integer.
int worker_count();

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Each index runs
/// exactly once; callers write results into slot i so the merge order is
/// fixed. The first exception thrown by fn is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers);

}  // namespace hippa

#endif  // HIPPA_PARALLEL_HPP
