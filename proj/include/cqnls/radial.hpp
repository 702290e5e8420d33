#pragma once

#include <vector>

#include "cqnls/field.hpp"

namespace cqnls {

/// Samples of a radial function on the uniform midpoint mesh
/// r_j = (j + 1/2) dr, j = 0..m-1. The first node is strictly positive so
/// singular radial kernels never see r = 0.
struct RadialProfile {
    std::vector<double> r;
    std::vector<cplx> f;
    double dr = 0.0;

    int size() const { return static_cast<int>(r.size()); }
    double r_max() const { return dr * size(); }

    static RadialProfile midpoint_mesh(int m, double dr);

    /// Value at radius s by cubic Lagrange interpolation on the mesh, with
    /// even reflection through the origin and zero beyond r_max.
    cplx interp(double s) const;

    /// L2(R^2) norm of the radial lift: sqrt(2 pi sum |f|^2 r dr).
    double l2_norm() const;
};

}  // namespace cqnls
