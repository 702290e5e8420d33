#include "cqnls/radial.hpp"

#include <cmath>

#include "cqnls/kernels.hpp"

namespace cqnls {

RadialProfile RadialProfile::midpoint_mesh(int m, double dr) {
    RadialProfile p;
    p.dr = dr;
    p.r.resize(static_cast<size_t>(m));
    p.f.assign(static_cast<size_t>(m), cplx{0.0, 0.0});
    for (int j = 0; j < m; ++j) p.r[static_cast<size_t>(j)] = (j + 0.5) * dr;
    return p;
}

cplx RadialProfile::interp(double s) const {
    s = std::abs(s);
    if (r.empty() || s >= r_max()) return {0.0, 0.0};
    // mesh index of s as a (possibly negative) fractional node position;
    // node j sits at (j+1/2)dr, so position p satisfies s = (p+1/2)dr
    const double p = s / dr - 0.5;
    const int m = size();
    int j0 = static_cast<int>(std::floor(p)) - 1;
    cplx acc{0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        const int j = j0 + k;
        // even reflection: node -1-i mirrors node i
        const int jj = (j < 0) ? -1 - j : j;
        if (jj >= m) continue;
        const double xj = j + 0.0;
        double w = 1.0;
        for (int l = 0; l < 4; ++l) {
            if (l == k) continue;
            const double xl = j0 + l;
            w *= (p - xl) / (xj - xl);
        }
        acc += w * f[static_cast<size_t>(jj)];
    }
    return acc;
}

double RadialProfile::l2_norm() const {
    const double s = kernels::reduce_indexed(size(), [&](long j) {
        return std::norm(f[static_cast<size_t>(j)]) * r[static_cast<size_t>(j)];
    });
    return std::sqrt(2.0 * M_PI * s * dr);
}

}  // namespace cqnls
