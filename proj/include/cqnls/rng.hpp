#pragma once

#include <cstdint>
#include <random>

#include "cqnls/field.hpp"
#include "cqnls/radial.hpp"

namespace cqnls {

/// Deterministic generator: mt19937_64 stream with explicit Box-Muller, so
/// sequences do not depend on the standard library's distribution internals.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    double uniform() {  // in [0, 1)
        return (eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }
    cplx cnormal() { return {normal(), normal()}; }

  private:
    std::mt19937_64 eng_;
    bool have_ = false;
    double cached_ = 0.0;
};

/// Smooth, spatially decaying random field: a few Gaussian bumps with random
/// centers (inside |x| < L/2), widths, amplitudes, phases and plane-wave
/// carriers below a third of the Nyquist frequency.
Field2D random_smooth_field(const GridSpec& g, uint64_t seed, int n_bumps = 6);

/// Radial analog used by the in/out tests: random radial Gaussian bumps with
/// bounded radial carrier frequency, supported away from the mesh edge.
RadialProfile random_bandlimited_profile(int m, double dr, uint64_t seed, double k_max = 8.0);

/// Per-point complex white noise (power-iteration starts).
Field2D random_white_field(const GridSpec& g, uint64_t seed);

}  // namespace cqnls
