#pragma once

#include <complex>
#include <cstdlib>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "cqnls/grid.hpp"

namespace cqnls {

using cplx = std::complex<double>;

/// 64-byte aligned allocator so FFTW SIMD plans can be reused across buffers.
template <class T>
struct AlignedAlloc {
    using value_type = T;
    AlignedAlloc() = default;
    template <class U>
    AlignedAlloc(const AlignedAlloc<U>&) {}
    T* allocate(std::size_t n) {
        void* p = std::aligned_alloc(64, ((n * sizeof(T) + 63) / 64) * 64);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { std::free(p); }
    template <class U>
    bool operator==(const AlignedAlloc<U>&) const { return true; }
};

/// Complex samples of u on a GridSpec, row-major: value at grid node
/// (ix, iy) lives at index ix*n + iy, with x = spec.x(ix), y = spec.x(iy).
/// Treated as immutable once published; operations return new fields.
class Field2D {
  public:
    Field2D() = default;
    explicit Field2D(const GridSpec& spec) : spec_(spec), v_(spec.size(), cplx{0.0, 0.0}) {}

    const GridSpec& spec() const { return spec_; }
    int n() const { return spec_.n; }
    long size() const { return spec_.size(); }

    cplx& at(int ix, int iy) { return v_[static_cast<long>(ix) * spec_.n + iy]; }
    const cplx& at(int ix, int iy) const { return v_[static_cast<long>(ix) * spec_.n + iy]; }
    cplx& operator[](long i) { return v_[i]; }
    const cplx& operator[](long i) const { return v_[i]; }

    cplx* data() { return v_.data(); }
    const cplx* data() const { return v_.data(); }
    std::span<cplx> values() { return {v_.data(), v_.size()}; }
    std::span<const cplx> values() const { return {v_.data(), v_.size()}; }

    /// Builds a field by sampling f(x, y) at the grid nodes.
    template <class F>
    static Field2D sample(const GridSpec& spec, F&& f) {
        Field2D u(spec);
        #pragma omp parallel for schedule(static)
        for (int ix = 0; ix < spec.n; ++ix) {
            const double x = spec.x(ix);
            for (int iy = 0; iy < spec.n; ++iy) u.at(ix, iy) = cplx(f(x, spec.x(iy)));
        }
        return u;
    }

    bool all_finite() const;

  private:
    GridSpec spec_;
    std::vector<cplx, AlignedAlloc<cplx>> v_;
};

/// "CQNLS-FIELD v1" file format: magic line, one JSON line {n, half_width},
/// then n*n little-endian float64 (re, im) pairs row-major.
void save_field(const Field2D& u, const std::string& path);
Field2D load_field(const std::string& path);

}  // namespace cqnls
