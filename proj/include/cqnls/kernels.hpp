#pragma once

#include <span>

#include "cqnls/field.hpp"

namespace cqnls::kernels {

/// Grid reductions use a fixed pairwise tree over 4096-element blocks, so the
/// result is bit-identical for any thread count. The *_serial variants run
/// the same tree without OpenMP and are kept as the reference path for tests
/// and the kernel benchmark.
inline constexpr long kReduceBlock = 4096;

double sum_pairwise_serial(std::span<const double> v);
double sum_pairwise(std::span<const double> v);

/// Deterministic transform-reduce: sum of term(i) over the grid, blocked as
/// above. Term must be pure.
template <class F>
double reduce_indexed_serial(long count, F&& term) {
    const long nblocks = (count + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(static_cast<size_t>(nblocks));
    std::vector<double> buf(static_cast<size_t>(kReduceBlock));
    for (long b = 0; b < nblocks; ++b) {
        const long lo = b * kReduceBlock, hi = std::min(count, lo + kReduceBlock);
        for (long i = lo; i < hi; ++i) buf[static_cast<size_t>(i - lo)] = term(i);
        partial[static_cast<size_t>(b)] = sum_pairwise_serial({buf.data(), static_cast<size_t>(hi - lo)});
    }
    return sum_pairwise_serial(partial);
}

template <class F>
double reduce_indexed(long count, F&& term) {
    const long nblocks = (count + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(static_cast<size_t>(nblocks));
    #pragma omp parallel
    {
        std::vector<double> buf(static_cast<size_t>(kReduceBlock));
        #pragma omp for schedule(static)
        for (long b = 0; b < nblocks; ++b) {
            const long lo = b * kReduceBlock, hi = std::min(count, lo + kReduceBlock);
            for (long i = lo; i < hi; ++i) buf[static_cast<size_t>(i - lo)] = term(i);
            partial[static_cast<size_t>(b)] = sum_pairwise_serial({buf.data(), static_cast<size_t>(hi - lo)});
        }
    }
    return sum_pairwise_serial(partial);
}

/// Deterministic max of term(i) (max is order-insensitive; plain omp max).
template <class F>
double max_indexed(long count, F&& term) {
    double m = 0.0;
    #pragma omp parallel for schedule(static) reduction(max : m)
    for (long i = 0; i < count; ++i) {
        const double v = term(i);
        if (v > m) m = v;
    }
    return m;
}

template <class F>
void map_inplace(std::span<cplx> v, F&& f) {
    const long count = static_cast<long>(v.size());
    #pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) v[static_cast<size_t>(i)] = f(i, v[static_cast<size_t>(i)]);
}

template <class F>
void map_inplace_serial(std::span<cplx> v, F&& f) {
    const long count = static_cast<long>(v.size());
    for (long i = 0; i < count; ++i) v[static_cast<size_t>(i)] = f(i, v[static_cast<size_t>(i)]);
}

}  // namespace cqnls::kernels
