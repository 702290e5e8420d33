#include "cqnls/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cqnls {

double lp_theta(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double a = std::exp(-1.0 / (2.0 - s));
    const double b = std::exp(-1.0 / (s - 1.0));
    return a / (a + b);
}

double lp_theta_prime(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double x = 2.0 - s, y = s - 1.0;
    const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / y);
    const double ap = -a / (x * x);  // d/ds exp(-1/(2-s))
    const double bp = b / (y * y);
    return (ap * (a + b) - a * (ap + bp)) / ((a + b) * (a + b));
}

Field2D to_spectrum(const Field2D& u) {
    Field2D w = u;
    const GridSpec& g = u.spec();
    FftEngine::get(g.n).forward(w.data());
    transpose_inplace(w.data(), g.n);  // back to (k1, k2) indexing
    const double h = g.spacing();
    const double scale = h * h / (2.0 * M_PI);
    kernels::map_inplace(w.values(), [scale](long, cplx v) { return v * scale; });
    return w;
}

Field2D from_spectrum(const Field2D& uh) {
    Field2D w = uh;
    const GridSpec& g = uh.spec();
    const double h = g.spacing();
    const double scale = 2.0 * M_PI / (h * h);
    kernels::map_inplace(w.values(), [scale](long, cplx v) { return v * scale; });
    transpose_inplace(w.data(), g.n);
    FftEngine::get(g.n).inverse(w.data());
    return w;
}

Field2D linear_flow(const Field2D& u, double t) {
    if (!u.all_finite()) throw std::invalid_argument("linear_flow: non-finite input field");
    return apply_symbol(u, [t](double kx, double ky) {
        const double w = t * (kx * kx + ky * ky);
        return cplx{std::cos(w), -std::sin(w)};
    });
}

namespace {

void check_band_freq(const GridSpec& g, double N) {
    int e = 0;
    const double mant = std::frexp(N, &e);
    if (N <= 0.0 || mant != 0.5)
        throw std::invalid_argument("lp_project: N must be an exact dyadic 2^k, got " +
                                    std::to_string(N));
    if (N < g.freq_resolution() || N > g.max_freq())
        throw std::invalid_argument("lp_project: N outside representable frequencies [" +
                                    std::to_string(g.freq_resolution()) + ", " +
                                    std::to_string(g.max_freq()) + "], got " + std::to_string(N));
}

}  // namespace

Field2D lp_project(const Field2D& u, Band band, double N) {
    check_band_freq(u.spec(), N);
    switch (band) {
        case Band::Low:
            return apply_symbol(u, [N](double kx, double ky) {
                return lp_theta(std::hypot(kx, ky) / N);
            });
        case Band::High:
            return apply_symbol(u, [N](double kx, double ky) {
                return 1.0 - lp_theta(std::hypot(kx, ky) / N);
            });
        case Band::Mid:
            return apply_symbol(u, [N](double kx, double ky) {
                const double s = std::hypot(kx, ky) / N;
                return lp_theta(s) - lp_theta(2.0 * s);
            });
    }
    throw std::logic_error("lp_project: bad band");
}

Gradient gradient(const Field2D& u) {
    const GridSpec& g = u.spec();
    const FftEngine& eng = FftEngine::get(g.n);
    Field2D spec = u;
    eng.forward(spec.data());
    const int n = g.n;
    Field2D gx = spec, gy = spec;
    kernels::map_inplace(gx.values(), [&](long i, cplx v) {
        return v * cplx{0.0, g.freq(static_cast<int>(i % n))};  // kx = column in transposed layout
    });
    kernels::map_inplace(gy.values(), [&](long i, cplx v) {
        return v * cplx{0.0, g.freq(static_cast<int>(i / n))};
    });
    eng.inverse(gx.data());
    eng.inverse(gy.data());
    return {std::move(gx), std::move(gy)};
}

Field2D laplacian(const Field2D& u) {
    return apply_symbol(u, [](double kx, double ky) { return -(kx * kx + ky * ky); });
}

double weighted_radial_sup(const Field2D& u) {
    const GridSpec& g = u.spec();
    const int n = g.n;
    return kernels::max_indexed(u.size(), [&](long i) {
        const double x = g.x(static_cast<int>(i / n)), y = g.x(static_cast<int>(i % n));
        return std::sqrt(std::hypot(x, y)) * std::abs(u[i]);
    });
}

double spectral_tail_fraction(const Field2D& u) {
    Field2D w = u;
    const GridSpec& g = u.spec();
    FftEngine::get(g.n).forward(w.data());
    const int n = g.n;
    const double cut = (2.0 / 3.0) * g.max_freq();
    const double total = kernels::reduce_indexed(w.size(), [&](long i) { return std::norm(w[i]); });
    if (total == 0.0) return 0.0;
    const double tail = kernels::reduce_indexed(w.size(), [&](long i) {
        const double kx = std::abs(g.freq(static_cast<int>(i % n)));
        const double ky = std::abs(g.freq(static_cast<int>(i / n)));
        return (kx > cut || ky > cut) ? std::norm(w[i]) : 0.0;
    });
    return std::sqrt(tail / total);
}

Field2D radial_cutoff(const GridSpec& g, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("radial_cutoff: R must be positive");
    return Field2D::sample(g, [R](double x, double y) { return lp_theta(std::hypot(x, y) / R); });
}

RadialAverageResult radial_average(const Field2D& u, int m) {
    if (m < 2) throw std::invalid_argument("radial_average: need at least 2 bins");
    const GridSpec& g = u.spec();
    const double dr = g.half_width / m;
    const int n = g.n;
    const double h = g.spacing();
    RadialAverageResult out;
    out.profile = RadialProfile::midpoint_mesh(m, dr);
    out.bin_counts.assign(static_cast<size_t>(m), 0);

    // lattice points share a radius exactly when di^2 + dj^2 matches, so
    // group by that integer; bins of the midpoint mesh then interpolate the
    // exact-radius means, which keeps the binning error second order
    const int half = n / 2;
    const long smax = 2L * half * half;
    std::vector<cplx> gsum(static_cast<size_t>(smax + 1), cplx{0.0, 0.0});
    std::vector<int> gcnt(static_cast<size_t>(smax + 1), 0);
    const long s_cut = static_cast<long>((g.half_width / h) * (g.half_width / h));
    for (int ix = 0; ix < n; ++ix) {
        const long di = ix - half;
        for (int iy = 0; iy < n; ++iy) {
            const long dj = iy - half;
            const long s = di * di + dj * dj;
            if (s >= s_cut) continue;
            gsum[static_cast<size_t>(s)] += u.at(ix, iy);
            ++gcnt[static_cast<size_t>(s)];
            const int bin = static_cast<int>(std::sqrt(static_cast<double>(s)) * h / dr);
            if (bin < m) ++out.bin_counts[static_cast<size_t>(bin)];
        }
    }

    double sup = 0.0;
    for (long i = 0; i < u.size(); ++i) sup = std::max(sup, std::abs(u[i]));
    double dev = 0.0;
    if (sup > 0.0) {
        for (int ix = 0; ix < n; ++ix) {
            const long di = ix - half;
            for (int iy = 0; iy < n; ++iy) {
                const long dj = iy - half;
                const long s = di * di + dj * dj;
                if (s >= s_cut) continue;
                const cplx mean =
                    gsum[static_cast<size_t>(s)] / static_cast<double>(gcnt[static_cast<size_t>(s)]);
                dev = std::max(dev, std::abs(u.at(ix, iy) - mean));
            }
        }
        dev /= sup;
    }
    out.angular_deviation = dev;

    // compact the occupied radii, then linearly interpolate onto the mesh
    std::vector<double> rad;
    std::vector<cplx> val;
    rad.reserve(4096);
    for (long s = 0; s <= smax; ++s) {
        if (gcnt[static_cast<size_t>(s)] == 0) continue;
        rad.push_back(h * std::sqrt(static_cast<double>(s)));
        val.push_back(gsum[static_cast<size_t>(s)] / static_cast<double>(gcnt[static_cast<size_t>(s)]));
    }
    size_t lo = 0;
    for (int j = 0; j < m; ++j) {
        const double r = out.profile.r[static_cast<size_t>(j)];
        while (lo + 1 < rad.size() && rad[lo + 1] < r) ++lo;
        if (lo + 1 >= rad.size()) {
            out.profile.f[static_cast<size_t>(j)] = val.back();
            continue;
        }
        const double w = (r - rad[lo]) / (rad[lo + 1] - rad[lo]);
        out.profile.f[static_cast<size_t>(j)] = (1.0 - w) * val[lo] + w * val[lo + 1];
    }
    return out;
}

Field2D lift_radial(const RadialProfile& f, const GridSpec& g) {
    return Field2D::sample(g, [&](double x, double y) { return f.interp(std::hypot(x, y)); });
}

}  // namespace cqnls
