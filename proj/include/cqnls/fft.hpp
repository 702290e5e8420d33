#pragma once

#include "cqnls/field.hpp"

namespace cqnls {

/// 2D complex DFT built from contiguous 1D FFTW passes plus an in-place
/// transpose. Each row transform is a serial FFTW kernel, so results are
/// bit-identical for any OpenMP thread count. Plans use FFTW_ESTIMATE and are
/// cached per grid size.
///
/// Layout contract: forward() leaves the spectrum TRANSPOSED, i.e. entry
/// (a, b) of the array holds the mode with DFT indices kx = b, ky = a, where
/// physical entry (ix, iy) sits at ix*n + iy. inverse() consumes that layout
/// and restores physical order including the 1/n^2 factor.
class FftEngine {
  public:
    static const FftEngine& get(int n);

    void forward(cplx* a) const;         // unnormalized, transposed output
    void inverse(cplx* a) const;         // normalized, physical output
    void forward_serial(cplx* a) const;  // reference path, same bits
    void inverse_serial(cplx* a) const;

    int size() const { return n_; }

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;
    ~FftEngine();

  private:
    explicit FftEngine(int n);

    int n_;
    void* plan_fwd_;  // fftw_plan, kept opaque here
    void* plan_bwd_;
};

void transpose_inplace(cplx* a, int n);
void transpose_inplace_serial(cplx* a, int n);

}  // namespace cqnls
