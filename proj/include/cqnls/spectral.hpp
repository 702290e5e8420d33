#pragma once

#include "cqnls/fft.hpp"
#include "cqnls/kernels.hpp"
#include "cqnls/radial.hpp"

namespace cqnls {

/// Smooth transition profile for Littlewood-Paley symbols and spatial
/// cutoffs: theta(s) = 1 for s <= 1, 0 for s >= 2, and
/// f(2-s)/(f(2-s)+f(s-1)) with f(x) = exp(-1/x) in between.
double lp_theta(double s);
double lp_theta_prime(double s);

/// Physically normalized spectrum: uh(k1,k2) = (h^2/2pi) sum u e^{-i xi.x}
/// indexed like the physical field, so Plancherel reads
/// sum |uh|^2 (dxi)^2 = sum |u|^2 h^2.
Field2D to_spectrum(const Field2D& u);
Field2D from_spectrum(const Field2D& uh);

/// F^{-1}[ sym(xi_x, xi_y) F u ]. The transform layout is handled here; sym
/// is called with the physical frequency pair.
template <class S>
Field2D apply_symbol(const Field2D& u, S&& sym) {
    Field2D w = u;
    const GridSpec& g = u.spec();
    const FftEngine& eng = FftEngine::get(g.n);
    eng.forward(w.data());
    const int n = g.n;
    kernels::map_inplace(w.values(), [&](long i, cplx v) {
        const int a = static_cast<int>(i / n), b = static_cast<int>(i % n);
        return v * sym(g.freq(b), g.freq(a));  // forward() output is transposed
    });
    eng.inverse(w.data());
    return w;
}

/// Free Schroedinger propagator e^{it Lap}: multiplication by
/// exp(-i t |xi|^2) in frequency space. Unitary, so exactly mass-preserving
/// up to rounding.
Field2D linear_flow(const Field2D& u, double t);

enum class Band { Low, Mid, High };  // P_{<=N}, P_N, P_{>N}

/// Littlewood-Paley projection with the lp_theta symbol family.
/// P_{<=N} + P_{>N} = Id exactly; P_N = P_{<=N} - P_{<=N/2}.
/// N must be an exact power of two with freq_resolution <= N <= max_freq.
Field2D lp_project(const Field2D& u, Band band, double N);

struct Gradient {
    Field2D dx, dy;
};
Gradient gradient(const Field2D& u);
Field2D laplacian(const Field2D& u);

/// max over the grid of |x|^{1/2} |u(x)| (radial Sobolev quantity).
double weighted_radial_sup(const Field2D& u);

/// L2 fraction of the spectrum with max(|xi_x|,|xi_y|) above 2pi/(3h), the
/// monitored aliasing-tail assumption for unpadded products.
double spectral_tail_fraction(const Field2D& u);

/// chi_R field: theta(|x|/R); 1 on |x|<=R, 0 on |x|>=2R.
Field2D radial_cutoff(const GridSpec& g, double R);

struct RadialAverageResult {
    RadialProfile profile;
    double angular_deviation = 0.0;    // max in-bin deviation / sup|u|
    std::vector<long> bin_counts;      // lattice points per annulus
};

/// Bin-averages |x|-annuli of width half_width/m onto the midpoint mesh
/// r_j = (j+1/2) dr. Empty bins (possible when dr < h) are filled by linear
/// interpolation from their nonempty neighbors; bin_counts records which.
RadialAverageResult radial_average(const Field2D& u, int m);

/// Samples a radial profile back onto the grid (cubic interpolation, even
/// reflection through r=0, zero beyond the mesh).
Field2D lift_radial(const RadialProfile& f, const GridSpec& g);

}  // namespace cqnls
