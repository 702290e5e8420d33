#include "cqnls/functionals.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cqnls {

double mass(const Field2D& u) {
    const double h = u.spec().spacing();
    return h * h * kernels::reduce_indexed(u.size(), [&](long i) { return std::norm(u[i]); });
}

double kinetic_energy(const Field2D& u) {
    const auto [gx, gy] = gradient(u);
    const double h = u.spec().spacing();
    return 0.5 * h * h *
           kernels::reduce_indexed(u.size(),
                                   [&](long i) { return std::norm(gx[i]) + std::norm(gy[i]); });
}

double lp_pow(const Field2D& u, int p) {
    if (p <= 0 || p % 2 != 0) throw std::invalid_argument("lp_pow: p must be positive even");
    const double h = u.spec().spacing();
    const int half = p / 2;
    return h * h * kernels::reduce_indexed(u.size(), [&](long i) {
        const double a2 = std::norm(u[i]);
        double v = a2;
        for (int k = 1; k < half; ++k) v *= a2;
        return v;
    });
}

double sup_norm(const Field2D& u) {
    return kernels::max_indexed(u.size(), [&](long i) { return std::abs(u[i]); });
}

double energy(const Field2D& u) {
    const auto [gx, gy] = gradient(u);
    const double h = u.spec().spacing();
    return h * h * kernels::reduce_indexed(u.size(), [&](long i) {
        const double a2 = std::norm(u[i]);
        return 0.5 * (std::norm(gx[i]) + std::norm(gy[i])) - 0.25 * a2 * a2 +
               a2 * a2 * a2 / 6.0;
    });
}

double gn_ratio(const Field2D& u, double mass_q) {
    const double m = mass(u);
    if (m <= 0.0) throw std::invalid_argument("gn_ratio: zero field");
    const double k2 = 2.0 * kinetic_energy(u);  // |grad u|_2^2
    if (k2 <= 0.0) throw std::invalid_argument("gn_ratio: zero gradient");
    return lp_pow(u, 4) * mass_q / (2.0 * m * k2);
}

// ---- psi weight: Phi(s) = int_0^s phi, via a dense cumulative Simpson
// table of the transition on [1,2] plus Hermite sub-node interpolation. The
// symmetry theta(3-s) = 1 - theta(s) makes Phi(2) = 3/2 exactly.
namespace {

constexpr int kTab = 8193;  // 4096 Simpson panels over [1,2]

struct PhiTable {
    std::array<double, kTab> cum;
    double step;
    PhiTable() {
        step = 1.0 / (kTab - 1);
        std::array<double, kTab> th;
        for (int i = 0; i < kTab; ++i) th[static_cast<size_t>(i)] = lp_theta(1.0 + i * step);
        cum[0] = 0.0;
        for (int i = 2; i < kTab; i += 2) {
            cum[static_cast<size_t>(i)] =
                cum[static_cast<size_t>(i - 2)] +
                step / 3.0 *
                    (th[static_cast<size_t>(i - 2)] + 4.0 * th[static_cast<size_t>(i - 1)] +
                     th[static_cast<size_t>(i)]);
        }
        // odd nodes by Hermite between even neighbors (values + theta slopes)
        for (int i = 1; i < kTab; i += 2) {
            const double a = cum[static_cast<size_t>(i - 1)], b = cum[static_cast<size_t>(i + 1)];
            const double fa = th[static_cast<size_t>(i - 1)], fb = th[static_cast<size_t>(i + 1)];
            const double hh = 2.0 * step;
            cum[static_cast<size_t>(i)] = 0.5 * (a + b) + hh * (fa - fb) / 8.0;
        }
    }
    double eval(double s) const {  // int_1^s theta on [1,2]
        const double p = (s - 1.0) / step;
        int i = static_cast<int>(p);
        if (i >= kTab - 1) i = kTab - 2;
        const double x = (p - i) * step;  // offset from node i
        const double fa = lp_theta(1.0 + i * step);
        const double fb = lp_theta(1.0 + (i + 1) * step);
        const double a = cum[static_cast<size_t>(i)], b = cum[static_cast<size_t>(i + 1)];
        // cubic Hermite for the antiderivative: H(0)=a, H(step)=b, H'=theta
        const double t = x / step;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = x * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = x * t * (t - 1);
        return h00 * a + h10 * fa + h01 * b + h11 * fb;
    }
};

const PhiTable& phi_table() {
    static const PhiTable t;
    return t;
}

double phi_integral(double s) {  // Phi(s) = int_0^s phi
    if (s <= 1.0) return s;
    if (s >= 2.0) return 1.5;
    return 1.0 + phi_table().eval(s);
}

}  // namespace

double weight_phi(double s) { return lp_theta(s); }

double weight_psi(double s) {
    if (s <= 1.0) return 1.0;
    return phi_integral(s) / s;
}

double weight_psi_prime(double s) {
    if (s <= 1.0) return 0.0;
    return (weight_phi(s) - weight_psi(s)) / s;
}

WeightPair make_weights(const GridSpec& g, double R) {
    if (!(R > 0.0) || !(R < g.half_width / 2.0))
        throw std::invalid_argument("make_weights: need 0 < R < half_width/2 so supp phi(./R) fits the box");
    WeightPair w;
    w.radius = R;
    w.phi = Field2D::sample(g, [R](double x, double y) { return weight_phi(std::hypot(x, y) / R); });
    w.psi = Field2D::sample(g, [R](double x, double y) { return weight_psi(std::hypot(x, y) / R); });
    w.chi = w.phi;
    Field2D sumw = w.phi;
    for (long i = 0; i < sumw.size(); ++i) sumw[i] += w.psi[i];
    w.lap_phi_psi = laplacian(sumw);
    return w;
}

double virial_A(const Field2D& u, const WeightPair& w) {
    if (!u.all_finite()) throw std::invalid_argument("virial_A: non-finite field");
    return virial_A(u, w, gradient(u));
}

double virial_A(const Field2D& u, const WeightPair& w, const Gradient& gr) {
    const GridSpec& g = u.spec();
    const int n = g.n;
    const double h = g.spacing();
    return h * h * kernels::reduce_indexed(u.size(), [&](long i) {
        const double x = g.x(static_cast<int>(i / n)), y = g.x(static_cast<int>(i % n));
        const cplx cu = std::conj(u[i]);
        const double ix_ = std::imag(cu * gr.dx[i]), iy_ = std::imag(cu * gr.dy[i]);
        return w.psi[i].real() * (x * ix_ + y * iy_);
    });
}

double virial_rate(const Field2D& u, const WeightPair& w) {
    return virial_rate(u, w, gradient(u));
}

double virial_rate(const Field2D& u, const WeightPair& w, const Gradient& gr) {
    const GridSpec& g = u.spec();
    const int n = g.n;
    const double h = g.spacing();
    return h * h * kernels::reduce_indexed(u.size(), [&](long i) {
        const double x = g.x(static_cast<int>(i / n)), y = g.x(static_cast<int>(i % n));
        const double r = std::hypot(x, y);
        const double a2 = std::norm(u[i]);
        // |d_r u|^2 = |x . grad u|^2 / r^2; zero at the origin node
        double ur2 = 0.0;
        if (r > 0.0) {
            const cplx du = x * gr.dx[i] + y * gr.dy[i];
            ur2 = std::norm(du) / (r * r);
        }
        const double wsum = w.psi[i].real() + w.phi[i].real();
        return -0.5 * w.lap_phi_psi[i].real() * a2 + 2.0 * w.phi[i].real() * ur2 -
               0.5 * wsum * a2 * a2 + (2.0 / 3.0) * wsum * a2 * a2 * a2;
    });
}

double local_energy(const Field2D& u, double R) {
    const auto [gx, gy] = gradient(u);
    const GridSpec& g = u.spec();
    const int n = g.n;
    const double h = g.spacing();
    return h * h * kernels::reduce_indexed(u.size(), [&](long i) {
        const double x = g.x(static_cast<int>(i / n)), y = g.x(static_cast<int>(i % n));
        const double chi = lp_theta(std::hypot(x, y) / R);
        const double a2 = std::norm(u[i]);
        return 0.5 * chi * (std::norm(gx[i]) + std::norm(gy[i])) - 0.25 * a2 * a2 +
               a2 * a2 * a2 / 6.0;
    });
}

double exterior_kinetic(const Field2D& u, double R) {
    return exterior_kinetic(u, R, gradient(u));
}

double exterior_kinetic(const Field2D& u, double R, const Gradient& gr) {
    const GridSpec& g = u.spec();
    const int n = g.n;
    const double h = g.spacing();
    return h * h * kernels::reduce_indexed(u.size(), [&](long i) {
        const double x = g.x(static_cast<int>(i / n)), y = g.x(static_cast<int>(i % n));
        const double chic = 1.0 - lp_theta(std::hypot(x, y) / R);
        return chic * (std::norm(gr.dx[i]) + std::norm(gr.dy[i]));
    });
}

ConcentrationScale concentration_scale(const Field2D& u, double eps) {
    if (!(eps > 0.0) || !(eps < 0.5))
        throw std::invalid_argument("concentration_scale: eps must lie in (0, 1/2)");
    const double m = mass(u);
    if (m <= 0.0) throw std::invalid_argument("concentration_scale: zero field");
    const GridSpec& g = u.spec();
    const int n = g.n;
    const double h = g.spacing();
    for (double lam = 1.0; lam < g.half_width; lam *= 2.0) {
        const double ext = h * h * kernels::reduce_indexed(u.size(), [&](long i) {
            const double x = g.x(static_cast<int>(i / n)), y = g.x(static_cast<int>(i % n));
            return (std::hypot(x, y) > lam) ? std::norm(u[i]) : 0.0;
        });
        if (ext < eps * m) return {lam, false};
    }
    return {g.half_width, true};
}

std::string diagnostics_csv_header() {
    return "t,mass,energy,kinetic,l4_4,l6_6,linf,weighted_sup,gn_ratio,virial_A,"
           "virial_rate,lambda,ext_kin_R1,ext_kin_R2,l4tx_accum";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
    char buf[640];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g",
                  r.t, r.mass, r.energy, r.kinetic, r.l4_4, r.l6_6, r.linf, r.weighted_sup,
                  r.gn_ratio, r.virial_A, r.virial_rate, r.lambda, r.ext_kin_r1, r.ext_kin_r2,
                  r.l4tx_accum);
    return buf;
}

}  // namespace cqnls
