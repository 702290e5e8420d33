#include "cqnls/rng.hpp"

#include <cmath>

namespace cqnls {

Field2D random_smooth_field(const GridSpec& g, uint64_t seed, int n_bumps) {
    Rng rng(seed);
    struct Bump {
        double cx, cy, w, amp, phase, kx, ky;
    };
    std::vector<Bump> bumps(static_cast<size_t>(n_bumps));
    const double kcap = g.max_freq() / 3.0;
    for (auto& b : bumps) {
        b.cx = rng.uniform(-0.4, 0.4) * g.half_width;
        b.cy = rng.uniform(-0.4, 0.4) * g.half_width;
        b.w = rng.uniform(0.6, 2.5);
        b.amp = rng.uniform(0.2, 1.0);
        b.phase = rng.uniform(0.0, 2.0 * M_PI);
        const double kmag = rng.uniform(0.0, std::min(4.0, kcap));
        const double kang = rng.uniform(0.0, 2.0 * M_PI);
        b.kx = kmag * std::cos(kang);
        b.ky = kmag * std::sin(kang);
    }
    return Field2D::sample(g, [&](double x, double y) {
        cplx v{0.0, 0.0};
        for (const auto& b : bumps) {
            const double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
            const double ph = b.phase + b.kx * x + b.ky * y;
            v += b.amp * std::exp(-d2 / (b.w * b.w)) * cplx{std::cos(ph), std::sin(ph)};
        }
        return v;
    });
}

RadialProfile random_bandlimited_profile(int m, double dr, uint64_t seed, double k_max) {
    Rng rng(seed);
    RadialProfile p = RadialProfile::midpoint_mesh(m, dr);
    const double rmax = p.r_max();
    const int n_bumps = 5;
    for (int b = 0; b < n_bumps; ++b) {
        const double c = rng.uniform(0.05, 0.6) * rmax;
        const double w = rng.uniform(0.02, 0.12) * rmax;
        const double amp = rng.uniform(0.2, 1.0);
        const double ph = rng.uniform(0.0, 2.0 * M_PI);
        const double k = rng.uniform(0.0, k_max);
        for (int j = 0; j < p.size(); ++j) {
            const double r = p.r[static_cast<size_t>(j)];
            const double ang = ph + k * r;
            p.f[static_cast<size_t>(j)] +=
                amp * std::exp(-(r - c) * (r - c) / (w * w)) * cplx{std::cos(ang), std::sin(ang)};
        }
    }
    return p;
}

Field2D random_white_field(const GridSpec& g, uint64_t seed) {
    Rng rng(seed);
    Field2D u(g);
    for (long i = 0; i < u.size(); ++i) u[i] = rng.cnormal();
    return u;
}

}  // namespace cqnls
