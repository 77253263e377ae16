#pragma once

#include <cstddef>
#include <exception>
#include <utility>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace xdf {

/// Execution policy for the data-parallel kernels. Both paths are built so
/// results are bitwise identical: parallel loops only write to disjoint
/// slots, and reductions accumulate into fixed-size blocks that are combined
/// in index order regardless of thread count.
enum class ExecPolicy {
    serial,
    parallel,
};

inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs fn(i) for i in [0, n). Iterations must be independent. If any
/// iteration throws, the exception from the lowest index is rethrown after
/// the loop under either policy, so error behavior does not depend on
/// scheduling.
template <typename F>
void for_each_index(std::size_t n, ExecPolicy policy, F&& fn) {
    std::exception_ptr error;
    std::size_t error_index = n;
    if (policy == ExecPolicy::parallel) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(xdf_for_each_index_error)
                if (static_cast<std::size_t>(i) < error_index) {
                    error_index = static_cast<std::size_t>(i);
                    error = std::current_exception();
                }
            }
        }
        if (error) {
            std::rethrow_exception(error);
        }
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
            if (i < error_index) {
                error_index = i;
                error = std::current_exception();
            }
            break;
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

/// Runs fn(block_index, begin, end) over fixed-size blocks of [0, n).
/// Block boundaries depend only on n and block_size, so a reduction that
/// accumulates per-block partials and combines them in block order gives
/// the same floating-point result under either policy.
template <typename F>
void for_each_block(std::size_t n, std::size_t block_size, ExecPolicy policy, F&& fn) {
    const std::size_t n_blocks = (n + block_size - 1) / block_size;
    for_each_index(n_blocks, policy, [&](std::size_t b) {
        const std::size_t begin = b * block_size;
        const std::size_t end = begin + block_size < n ? begin + block_size : n;
        fn(b, begin, end);
    });
}

} // namespace xdf
