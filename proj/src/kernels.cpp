#include "cqnls/kernels.hpp"

#include <algorithm>
#include <vector>

namespace cqnls::kernels {

namespace {

// Pairwise tree with a fixed leaf size; order depends only on the length.
double tree(const double* v, long n) {
    if (n <= 8) {
        double s = 0.0;
        for (long i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const long half = n / 2;
    return tree(v, half) + tree(v + half, n - half);
}

}  // namespace

double sum_pairwise_serial(std::span<const double> v) {
    const long count = static_cast<long>(v.size());
    if (count <= kReduceBlock) return tree(v.data(), count);
    const long nblocks = (count + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(static_cast<size_t>(nblocks));
    for (long b = 0; b < nblocks; ++b) {
        const long lo = b * kReduceBlock;
        partial[static_cast<size_t>(b)] = tree(v.data() + lo, std::min(count - lo, kReduceBlock));
    }
    return sum_pairwise_serial(partial);
}

double sum_pairwise(std::span<const double> v) {
    const long count = static_cast<long>(v.size());
    if (count <= kReduceBlock) return tree(v.data(), count);
    const long nblocks = (count + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(static_cast<size_t>(nblocks));
    #pragma omp parallel for schedule(static)
    for (long b = 0; b < nblocks; ++b) {
        const long lo = b * kReduceBlock;
        partial[static_cast<size_t>(b)] = tree(v.data() + lo, std::min(count - lo, kReduceBlock));
    }
    return sum_pairwise_serial(partial);
}

}  // namespace cqnls::kernels
