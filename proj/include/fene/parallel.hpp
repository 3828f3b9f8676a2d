// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fene {

// Global worker count used by all particle loops. Defaults to the hardware
// concurrency; overridable via set_num_threads or FENE_CLOSURE_THREADS.
void set_num_threads(int n);
int num_threads();

// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries
// depend only on n and grain, never on the worker count, so per-index work
// (RNG streams, per-slot writes) is reproducible for any thread count.
void parallel_for_chunks(std::size_t n, std::size_t grain,
                         const std::function<void(std::size_t, std::size_t)>& fn);

// Fixed chunk size used by deterministic reductions.
inline constexpr std::size_t kReduceBlock = 2048;

namespace detail {
// Combines per-block partial sums (nblocks x k, row-major) pairwise in block
// order; the result is independent of how blocks were assigned to workers.
std::vector<double> pairwise_combine(std::vector<double>&& partials, std::size_t nblocks,
                                     std::size_t k);
} // namespace detail

// k-valued sum over [0, n): acc(i, slot) must add item i's contribution into
// slot[0..k). Within a block the sum is sequential in index order; block
// partials are combined pairwise, so the result is bit-stable across runs
// and worker counts.
template <typename Acc>
std::vector<double> block_sum(std::size_t n, std::size_t k, Acc&& acc) {
    const std::size_t nblocks = n == 0 ? 0 : (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partials(nblocks * k, 0.0);
    parallel_for_chunks(n, kReduceBlock, [&](std::size_t b0, std::size_t b1) {
        const std::size_t block = b0 / kReduceBlock;
        double* slot = partials.data() + block * k;
        for (std::size_t i = b0; i < b1; ++i) acc(i, slot);
    });
    return detail::pairwise_combine(std::move(partials), nblocks, k);
}

} // namespace fene
