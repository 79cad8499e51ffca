// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_PARALLEL_HPP
#define EIGENROM_PARALLEL_HPP

#include <functional>

namespace eigenrom
{

// requested > 0 wins; otherwise EIGENROM_JOBS, then the hardware thread count.
int resolve_jobs(int requested);

//
// Run body(i) for i in [0, n) on up to `jobs` threads. Iterations must write to
// disjoint outputs. If any iteration throws, the exception of the lowest failing
// index is rethrown after all threads finish.
//
void parallel_for(int n, int jobs, const std::function<void(int)> &body);

}  // namespace eigenrom

#endif  // EIGENROM_PARALLEL_HPP
