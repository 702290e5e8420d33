#include "cqnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace cqnls {

namespace {
std::mutex g_plan_mutex;

inline fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

FftEngine::FftEngine(int n) : n_(n) {
    std::vector<cplx, AlignedAlloc<cplx>> scratch(static_cast<size_t>(n));
    plan_fwd_ = fftw_plan_dft_1d(n, fc(scratch.data()), fc(scratch.data()),
                                 FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_1d(n, fc(scratch.data()), fc(scratch.data()),
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftEngine::~FftEngine() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

const FftEngine& FftEngine::get(int n) {
    static std::map<int, std::unique_ptr<FftEngine>>* cache =
        new std::map<int, std::unique_ptr<FftEngine>>;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = cache->find(n);
    if (it == cache->end())
        it = cache->emplace(n, std::unique_ptr<FftEngine>(new FftEngine(n))).first;
    return *it->second;
}

void transpose_inplace(cplx* a, int n) {
    constexpr int B = 32;
    #pragma omp parallel for schedule(static)
    for (int bi = 0; bi < n; bi += B)
        for (int bj = bi; bj < n; bj += B)
            for (int i = bi; i < std::min(bi + B, n); ++i) {
                const int j0 = (bj == bi) ? i + 1 : bj;
                for (int j = j0; j < std::min(bj + B, n); ++j)
                    std::swap(a[static_cast<long>(i) * n + j], a[static_cast<long>(j) * n + i]);
            }
}

void transpose_inplace_serial(cplx* a, int n) {
    constexpr int B = 32;
    for (int bi = 0; bi < n; bi += B)
        for (int bj = bi; bj < n; bj += B)
            for (int i = bi; i < std::min(bi + B, n); ++i) {
                const int j0 = (bj == bi) ? i + 1 : bj;
                for (int j = j0; j < std::min(bj + B, n); ++j)
                    std::swap(a[static_cast<long>(i) * n + j], a[static_cast<long>(j) * n + i]);
            }
}

void FftEngine::forward(cplx* a) const {
    const auto p = static_cast<fftw_plan>(plan_fwd_);
    #pragma omp parallel for schedule(static)
    for (int r = 0; r < n_; ++r) fftw_execute_dft(p, fc(a + static_cast<long>(r) * n_), fc(a + static_cast<long>(r) * n_));
    transpose_inplace(a, n_);
    #pragma omp parallel for schedule(static)
    for (int r = 0; r < n_; ++r) fftw_execute_dft(p, fc(a + static_cast<long>(r) * n_), fc(a + static_cast<long>(r) * n_));
}

void FftEngine::inverse(cplx* a) const {
    const auto p = static_cast<fftw_plan>(plan_bwd_);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    #pragma omp parallel for schedule(static)
    for (int r = 0; r < n_; ++r) fftw_execute_dft(p, fc(a + static_cast<long>(r) * n_), fc(a + static_cast<long>(r) * n_));
    transpose_inplace(a, n_);
    #pragma omp parallel for schedule(static)
    for (int r = 0; r < n_; ++r) {
        fftw_execute_dft(p, fc(a + static_cast<long>(r) * n_), fc(a + static_cast<long>(r) * n_));
        for (int c = 0; c < n_; ++c) a[static_cast<long>(r) * n_ + c] *= scale;
    }
}

void FftEngine::forward_serial(cplx* a) const {
    const auto p = static_cast<fftw_plan>(plan_fwd_);
    for (int r = 0; r < n_; ++r) fftw_execute_dft(p, fc(a + static_cast<long>(r) * n_), fc(a + static_cast<long>(r) * n_));
    transpose_inplace_serial(a, n_);
    for (int r = 0; r < n_; ++r) fftw_execute_dft(p, fc(a + static_cast<long>(r) * n_), fc(a + static_cast<long>(r) * n_));
}

void FftEngine::inverse_serial(cplx* a) const {
    const auto p = static_cast<fftw_plan>(plan_bwd_);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    for (int r = 0; r < n_; ++r) fftw_execute_dft(p, fc(a + static_cast<long>(r) * n_), fc(a + static_cast<long>(r) * n_));
    transpose_inplace_serial(a, n_);
    for (int r = 0; r < n_; ++r) {
        fftw_execute_dft(p, fc(a + static_cast<long>(r) * n_), fc(a + static_cast<long>(r) * n_));
        for (int c = 0; c < n_; ++c) a[static_cast<long>(r) * n_ + c] *= scale;
    }
}

}  // namespace cqnls
