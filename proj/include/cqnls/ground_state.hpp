#pragma once

#include <string>
#include <vector>

#include "cqnls/functionals.hpp"

namespace cqnls {

struct GroundStateResult {
    Field2D q;                // real, nonnegative, radial
    double mass_q = 0.0;      // M(Q) by grid quadrature
    double residual = 0.0;    // sup | -Q + Lap Q + Q^3 |
    int iterations = 0;
    double last_s = 0.0;      // final Petviashvili normalization factor
    std::vector<std::string> warnings;
};

/// Petviashvili iteration Q <- S^{3/2} (1 - Lap)^{-1} Q^3 with
/// S = <Q,(1-Lap)Q>/<Q,Q^3>, seeded by 2.2 exp(-|x|^2/2) unless a seed field
/// is supplied. Stops when the equation residual drops below tol; throws on
/// non-convergence (message carries the last residual). A boundary value of
/// Q above 1e-8 attaches a "box too small" warning.
GroundStateResult petviashvili(const GridSpec& g, double tol, int max_iter,
                               const Field2D* seed = nullptr);

/// Independent radial oracle for Q'' + Q'/r - Q + Q^3 = 0: bisection on
/// Q(0) in [2, 2.5], RK4 on the midpoint mesh with a series start at dr/2.
/// A shot is accepted when it never crosses zero, is strictly decreasing
/// wherever Q > tol, and ends below tol at r_max.
RadialProfile shooting_oracle(double r_max, double dr, double tol);

/// Mass of a radial profile by midpoint quadrature, 2 pi int |f|^2 r dr.
double profile_mass(const RadialProfile& p);

struct PohozaevResiduals {
    double grad_mass = 0.0;   // | |grad Q|^2 - M(Q) | / M(Q)
    double l4_mass = 0.0;     // | |Q|_4^4 - 2 M(Q) | / |Q|_4^4
    double energy_l6 = 0.0;   // | E(Q) - (1/6)|Q|_6^6 | / E(Q)
};

PohozaevResiduals pohozaev_check(const GroundStateResult& gs);

}  // namespace cqnls
