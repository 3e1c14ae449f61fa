// parallel.hpp — deterministic OpenMP reduction helpers.
//
// Results must be byte-identical regardless of OMP_NUM_THREADS, so reductions
// are done in fixed chunks: each chunk is summed serially in index order and
// the per-chunk partials are combined serially in chunk order.  The floating
// point result therefore depends only on the chunk size, which is a compile
// time constant.
#pragma once

#include <cstdint>
#include <vector>

#include "cavitysense/types.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace cavitysense {

inline constexpr std::int64_t det_chunk = 1024;

// Σ_{i=0}^{n-1} term(i), thread-count independent.
template <class T, class F>
T ordered_sum(std::int64_t n, F&& term) {
    if (n <= 0) return T{};
    const std::int64_t nchunks = (n + det_chunk - 1) / det_chunk;
    std::vector<T> partial(static_cast<std::size_t>(nchunks), T{});
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t c = 0; c < nchunks; ++c) {
        const std::int64_t lo = c * det_chunk;
        const std::int64_t hi = std::min(n, lo + det_chunk);
        T acc{};
        for (std::int64_t i = lo; i < hi; ++i) acc += term(i);
        partial[static_cast<std::size_t>(c)] = acc;
    }
    T total{};
    for (const T& p : partial) total += p;
    return total;
}

// Plain serial reference for the reduction above (used by tests/benchmarks;
// agrees with ordered_sum to rounding, not bitwise).
template <class T, class F>
T serial_sum(std::int64_t n, F&& term) {
    T total{};
    for (std::int64_t i = 0; i < n; ++i) total += term(i);
    return total;
}

inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int k) {
#if defined(_OPENMP)
    if (k > 0) omp_set_num_threads(k);
#else
    (void)k;
#endif
}

}  // namespace cavitysense
