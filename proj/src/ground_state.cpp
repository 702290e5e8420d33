#include "cqnls/ground_state.hpp"

#include <cmath>
#include <stdexcept>

namespace cqnls {

GroundStateResult petviashvili(const GridSpec& g, double tol, int max_iter, const Field2D* seed) {
    if (!(tol > 0.0)) throw std::invalid_argument("petviashvili: tol must be positive");
    const FftEngine& eng = FftEngine::get(g.n);
    const int n = g.n;
    const long sz = g.size();

    Field2D q = seed ? *seed
                     : Field2D::sample(g, [](double x, double y) {
                           return 2.2 * std::exp(-(x * x + y * y) / 2.0);
                       });

    // spectrum of the current iterate ((transposed layout, unnormalized DFT)
    Field2D qhat = q;
    eng.forward(qhat.data());

    GroundStateResult out;
    for (int it = 1; it <= max_iter; ++it) {
        Field2D cube(g);
        kernels::map_inplace(cube.values(), [&](long i, cplx) {
            const double v = q[i].real();
            return cplx{v * v * v, 0.0};
        });
        Field2D cube_hat = cube;
        eng.forward(cube_hat.data());

        // S = <Q,(1-Lap)Q>/<Q,Q^3>; numerator via Parseval on qhat
        const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
        const double num = inv_n2 * kernels::reduce_indexed(sz, [&](long i) {
            const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
            return (1.0 + kx * kx + ky * ky) * std::norm(qhat[i]);
        });
        const double den = kernels::reduce_indexed(sz, [&](long i) {
            const double v = q[i].real();
            return v * v * v * v;
        });
        const double s = num / den;
        const double gamma = std::pow(s, 1.5);

        kernels::map_inplace(qhat.values(), [&](long i, cplx) {
            const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
            return gamma * cube_hat[i] / (1.0 + kx * kx + ky * ky);
        });
        Field2D lap = qhat;
        kernels::map_inplace(lap.values(), [&](long i, cplx v) {
            const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
            return -(kx * kx + ky * ky) * v;
        });
        Field2D qnew = qhat;
        eng.inverse(qnew.data());
        eng.inverse(lap.data());
        kernels::map_inplace(qnew.values(), [](long, cplx v) { return cplx{v.real(), 0.0}; });
        q = std::move(qnew);

        out.residual = kernels::max_indexed(sz, [&](long i) {
            const double v = q[i].real();
            return std::abs(-v + lap[i].real() + v * v * v);
        });
        out.iterations = it;
        out.last_s = s;
        if (out.residual <= tol) break;
    }
    if (out.residual > tol)
        throw std::runtime_error("petviashvili: no convergence within " +
                                 std::to_string(max_iter) +
                                 " iterations; last residual = " + std::to_string(out.residual));

    double edge = 0.0;
    for (int j = 0; j < n; ++j) {
        edge = std::max(edge, std::abs(q.at(0, j).real()));
        edge = std::max(edge, std::abs(q.at(j, 0).real()));
    }
    if (edge > 1e-8)
        out.warnings.push_back("box too small: |Q| = " + std::to_string(edge) +
                               " at the boundary");

    out.q = std::move(q);
    out.mass_q = mass(out.q);
    return out;
}

namespace {

struct Shot {
    enum class Status { Crossed, Grew, Reached } status;
    std::vector<double> q;  // values on the midpoint mesh
};

Shot integrate_shot(double a, int m, double dr) {
    Shot s;
    s.q.reserve(static_cast<size_t>(m));
    const double c2 = (a - a * a * a) / 4.0;
    const double c4 = c2 * (1.0 - 3.0 * a * a) / 16.0;
    double r = dr / 2.0;
    double q = a + c2 * r * r + c4 * r * r * r * r;
    double p = 2.0 * c2 * r + 4.0 * c4 * r * r * r;
    s.q.push_back(q);
    s.status = Shot::Status::Reached;
    auto fp = [](double r_, double q_, double p_) { return q_ - q_ * q_ * q_ - p_ / r_; };
    for (int j = 1; j < m; ++j) {
        const double k1q = p, k1p = fp(r, q, p);
        const double k2q = p + 0.5 * dr * k1p, k2p = fp(r + 0.5 * dr, q + 0.5 * dr * k1q, p + 0.5 * dr * k1p);
        const double k3q = p + 0.5 * dr * k2p, k3p = fp(r + 0.5 * dr, q + 0.5 * dr * k2q, p + 0.5 * dr * k2p);
        const double k4q = p + dr * k3p, k4p = fp(r + dr, q + dr * k3q, p + dr * k3p);
        q += dr / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += dr / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        r += dr;
        s.q.push_back(q);
        if (q < 0.0) {
            s.status = Shot::Status::Crossed;
            break;
        }
        if (p > 0.0) {
            s.status = Shot::Status::Grew;
            break;
        }
    }
    return s;
}

bool acceptable(const Shot& s, int m, double tol) {
    if (s.status == Shot::Status::Crossed) return false;
    if (static_cast<int>(s.q.size()) < m && s.status == Shot::Status::Grew) {
        // grew before reaching r_max: fine only if already deep in the tail
        if (s.q.back() > tol) return false;
    }
    if (!s.q.empty() && s.q.back() > tol) return false;
    for (size_t j = 1; j < s.q.size(); ++j)
        if (s.q[j] >= s.q[j - 1] && s.q[j - 1] > tol) return false;
    return true;
}

}  // namespace

RadialProfile shooting_oracle(double r_max, double dr, double tol) {
    if (!(r_max >= 15.0)) throw std::invalid_argument("shooting_oracle: r_max must be >= 15");
    if (!(dr > 0.0) || dr > 1e-3)
        throw std::invalid_argument("shooting_oracle: dr must be in (0, 1e-3]");
    if (!(tol > 0.0)) throw std::invalid_argument("shooting_oracle: tol must be positive");
    const int m = static_cast<int>(std::llround(r_max / dr));

    double lo = 2.0, hi = 2.5;
    if (integrate_shot(lo, m, dr).status != Shot::Status::Grew ||
        integrate_shot(hi, m, dr).status != Shot::Status::Crossed)
        throw std::runtime_error("shooting_oracle: bracket failure at [2, 2.5] (integrator bug?)");
    for (int it = 0; it < 80 && (hi - lo) > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (integrate_shot(mid, m, dr).status == Shot::Status::Crossed)
            hi = mid;
        else
            lo = mid;
    }

    for (const double a : {0.5 * (lo + hi), lo}) {
        Shot s = integrate_shot(a, m, dr);
        if (!acceptable(s, m, tol)) continue;
        RadialProfile p = RadialProfile::midpoint_mesh(m, dr);
        // pad a truncated deep-tail shot with its last value (below tol)
        for (int j = 0; j < m; ++j) {
            const size_t k = std::min(s.q.size() - 1, static_cast<size_t>(j));
            p.f[static_cast<size_t>(j)] = cplx{s.q[k], 0.0};
        }
        return p;
    }
    throw std::runtime_error("shooting_oracle: no accepted shot after bisection (bracket failure)");
}

double profile_mass(const RadialProfile& p) {
    const double s = kernels::reduce_indexed(p.size(), [&](long j) {
        return std::norm(p.f[static_cast<size_t>(j)]) * p.r[static_cast<size_t>(j)];
    });
    return 2.0 * M_PI * s * p.dr;
}

PohozaevResiduals pohozaev_check(const GroundStateResult& gs) {
    const double m = mass(gs.q);
    const double g2 = 2.0 * kinetic_energy(gs.q);
    const double p4 = lp_pow(gs.q, 4);
    const double p6 = lp_pow(gs.q, 6);
    const double e = energy(gs.q);
    return {std::abs(g2 - m) / m, std::abs(p4 - 2.0 * m) / p4, std::abs(e - p6 / 6.0) / e};
}

}  // namespace cqnls
