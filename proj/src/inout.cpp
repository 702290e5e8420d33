#include "cqnls/inout.hpp"

#include <cmath>
#include <stdexcept>

#include "cqnls/rng.hpp"

namespace cqnls {

PvKernelPlan make_pv_plan(int m, double dr) {
    if (m < 8 || !(dr > 0.0)) throw std::invalid_argument("make_pv_plan: bad mesh");
    PvKernelPlan plan{m, dr, {}};
    plan.pv_log.resize(static_cast<size_t>(m));
    const double rt = m * dr;
    for (int i = 0; i < m; ++i) {
        const double r = (i + 0.5) * dr;
        plan.pv_log[static_cast<size_t>(i)] = std::log((rt + r) / (rt - r)) / (2.0 * r);
    }
    return plan;
}

namespace {

// 4th-order derivative on the uniform mesh (one-sided at the ends)
std::vector<cplx> mesh_derivative(const RadialProfile& f) {
    const int m = f.size();
    std::vector<cplx> d(static_cast<size_t>(m));
    const double inv = 1.0 / (12.0 * f.dr);
    for (int j = 0; j < m; ++j) {
        if (j >= 2 && j < m - 2) {
            d[static_cast<size_t>(j)] = (f.f[static_cast<size_t>(j - 2)] - 8.0 * f.f[static_cast<size_t>(j - 1)] +
                                         8.0 * f.f[static_cast<size_t>(j + 1)] - f.f[static_cast<size_t>(j + 2)]) *
                                        inv;
        } else if (j < 2) {
            d[static_cast<size_t>(j)] =
                (-25.0 * f.f[static_cast<size_t>(j)] + 48.0 * f.f[static_cast<size_t>(j + 1)] -
                 36.0 * f.f[static_cast<size_t>(j + 2)] + 16.0 * f.f[static_cast<size_t>(j + 3)] -
                 3.0 * f.f[static_cast<size_t>(j + 4)]) /
                (12.0 * f.dr);
        } else {
            d[static_cast<size_t>(j)] =
                (25.0 * f.f[static_cast<size_t>(j)] - 48.0 * f.f[static_cast<size_t>(j - 1)] +
                 36.0 * f.f[static_cast<size_t>(j - 2)] - 16.0 * f.f[static_cast<size_t>(j - 3)] +
                 3.0 * f.f[static_cast<size_t>(j - 4)]) /
                (12.0 * f.dr);
        }
    }
    return d;
}

}  // namespace

RadialProfile inout_apply(const RadialProfile& f, int sign, const PvKernelPlan& plan) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("inout_apply: sign must be +-1");
    const int m = f.size();
    if (plan.m != m || std::abs(plan.dr - f.dr) > 1e-14 * f.dr)
        throw std::invalid_argument("inout_apply: mesh mismatch with plan");

    const std::vector<cplx> fp = mesh_derivative(f);
    RadialProfile out = RadialProfile::midpoint_mesh(m, f.dr);
    const cplx unit = (sign > 0) ? cplx{0.0, 1.0 / M_PI} : cplx{0.0, -1.0 / M_PI};

    #pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        const double r = f.r[static_cast<size_t>(i)];
        const cplx fr = f.f[static_cast<size_t>(i)];
        cplx acc{0.0, 0.0};
        for (int j = 0; j < m; ++j) {
            if (j == i) {
                // removable limit of [f(rho) rho - f(r) r]/(r^2 - rho^2)
                acc += -(fp[static_cast<size_t>(i)] * r + fr) / (2.0 * r);
                continue;
            }
            const double rho = f.r[static_cast<size_t>(j)];
            acc += (f.f[static_cast<size_t>(j)] * rho - fr * r) / ((r - rho) * (r + rho));
        }
        const cplx pv = acc * f.dr + fr * r * plan.pv_log[static_cast<size_t>(i)];
        out.f[static_cast<size_t>(i)] = 0.5 * fr + unit * pv;
    }
    return out;
}

RadialProfile inout_band(const RadialProfile& f, double N, int sign, const GridSpec& g) {
    const int m = f.size();
    if (std::abs(m * f.dr - g.half_width) > 1e-10 * g.half_width)
        throw std::invalid_argument("inout_band: mesh must span the grid half_width");
    const Field2D band = lp_project(lift_radial(f, g), Band::Mid, N);
    const RadialProfile extracted = radial_average(band, m).profile;
    return inout_apply(extracted, sign, make_pv_plan(m, f.dr));
}

namespace {

struct MismatchOp {
    const GridSpec& g;
    MismatchKind kind;
    double N;
    Field2D outer_c;  // 1 - chi_R
    Field2D inner;    // chi_{R/2}
    const MismatchOptions& opt;

    // T*T for kind 1: chi_{R/2} sum_k P_{<=N}(-d_k)( chi_R^c [chi_R^c d_k P_{<=N} (chi_{R/2} u)] )
    // T*T for kind 2: P_{>4N} chi_R^c P_{<=N} P_{<=N} chi_R^c P_{>4N}
    Field2D apply_TstarT(const Field2D& u) const {
        if (opt.zero_operator) return Field2D(g);
        const FftEngine& eng = FftEngine::get(g.n);
        const int n = g.n;
        auto low = [&](double kx, double ky) { return lp_theta(std::hypot(kx, ky) / N); };
        if (kind == MismatchKind::GradLowpassBetween) {
            Field2D w = u;
            if (!opt.drop_inner_cutoff)
                kernels::map_inplace(w.values(), [&](long i, cplx v) { return v * inner[i].real(); });
            eng.forward(w.data());
            Field2D wx = w, wy = w;
            kernels::map_inplace(wx.values(), [&](long i, cplx v) {
                const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
                return v * cplx{0.0, kx} * low(kx, ky);
            });
            kernels::map_inplace(wy.values(), [&](long i, cplx v) {
                const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
                return v * cplx{0.0, ky} * low(kx, ky);
            });
            eng.inverse(wx.data());
            eng.inverse(wy.data());
            if (!opt.drop_outer_cutoff) {
                // chi_R^c twice: once as T's final factor, once opening T*
                kernels::map_inplace(wx.values(), [&](long i, cplx v) {
                    const double c = outer_c[i].real();
                    return v * c * c;
                });
                kernels::map_inplace(wy.values(), [&](long i, cplx v) {
                    const double c = outer_c[i].real();
                    return v * c * c;
                });
            }
            eng.forward(wx.data());
            eng.forward(wy.data());
            Field2D acc(g);
            kernels::map_inplace(acc.values(), [&](long i, cplx) {
                const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
                const double lo = low(kx, ky);
                return lo * (cplx{0.0, -kx} * wx[i] + cplx{0.0, -ky} * wy[i]);
            });
            eng.inverse(acc.data());
            if (!opt.drop_inner_cutoff)
                kernels::map_inplace(acc.values(), [&](long i, cplx v) { return v * inner[i].real(); });
            return acc;
        }
        // kind 2
        Field2D w = u;
        eng.forward(w.data());
        if (!opt.drop_inner_cutoff)
            kernels::map_inplace(w.values(), [&](long i, cplx v) {
                const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
                return v * (1.0 - lp_theta(std::hypot(kx, ky) / (4.0 * N)));
            });
        eng.inverse(w.data());
        if (!opt.drop_outer_cutoff)
            kernels::map_inplace(w.values(), [&](long i, cplx v) { return v * outer_c[i].real(); });
        eng.forward(w.data());
        kernels::map_inplace(w.values(), [&](long i, cplx v) {
            const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
            const double lo = low(kx, ky);
            return v * lo * lo;
        });
        eng.inverse(w.data());
        if (!opt.drop_outer_cutoff)
            kernels::map_inplace(w.values(), [&](long i, cplx v) { return v * outer_c[i].real(); });
        eng.forward(w.data());
        if (!opt.drop_inner_cutoff)
            kernels::map_inplace(w.values(), [&](long i, cplx v) {
                const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
                return v * (1.0 - lp_theta(std::hypot(kx, ky) / (4.0 * N)));
            });
        eng.inverse(w.data());
        return w;
    }
};

double dot_real(const Field2D& a, const Field2D& b) {
    return kernels::reduce_indexed(a.size(), [&](long i) {
        return a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    });
}

}  // namespace

MismatchEstimate mismatch_norm(const GridSpec& g, MismatchKind kind, double R, double N,
                               int trials, uint64_t seed, const MismatchOptions& opt) {
    if (!(R >= 1.0)) throw std::invalid_argument("mismatch_norm: R must be >= 1");
    if (trials < 1) throw std::invalid_argument("mismatch_norm: trials must be >= 1");
    int e = 0;
    if (std::frexp(N, &e) != 0.5 || N < g.freq_resolution() || N > g.max_freq())
        throw std::invalid_argument("mismatch_norm: N must be dyadic and representable");

    MismatchOp op{g, kind, N,
                  Field2D::sample(g, [R](double x, double y) {
                      return 1.0 - lp_theta(std::hypot(x, y) / R);
                  }),
                  Field2D::sample(g, [R](double x, double y) {
                      return lp_theta(std::hypot(x, y) / (R / 2.0));
                  }),
                  opt};

    double best = 0.0, worst = -1.0;
    int worst_sweeps = 0;
    for (int t = 0; t < trials; ++t) {
        Field2D v = random_white_field(g, seed + static_cast<uint64_t>(t) * 0x9e3779b97f4a7c15ull);
        double nrm = std::sqrt(dot_real(v, v));
        for (long i = 0; i < v.size(); ++i) v[i] /= nrm;
        double lam = 0.0;
        bool converged = false;
        int sweeps = 0;
        for (; sweeps < opt.max_sweeps; ++sweeps) {
            Field2D w = op.apply_TstarT(v);
            const double lam_new = dot_real(v, w);
            const double wn = std::sqrt(dot_real(w, w));
            if (lam_new <= 1e-300 || wn <= 1e-300) {
                lam = std::max(lam_new, 0.0);
                converged = true;
                break;
            }
            for (long i = 0; i < w.size(); ++i) w[i] /= wn;
            v = std::move(w);
            if (sweeps > 0 && std::abs(lam_new - lam) <= opt.rel_tol * lam_new) {
                lam = lam_new;
                converged = true;
                break;
            }
            lam = lam_new;
        }
        if (!converged)
            throw std::runtime_error("mismatch_norm: power iteration failed to converge within " +
                                     std::to_string(opt.max_sweeps) + " sweeps");
        const double est = std::sqrt(std::max(lam, 0.0));
        best = std::max(best, est);
        worst = (worst < 0.0) ? est : std::min(worst, est);
        worst_sweeps = std::max(worst_sweeps, sweeps);
    }
    return {best, best - std::max(worst, 0.0), worst_sweeps};
}

std::vector<FreqDecayRow> freq_decay_scan(const Trajectory& traj,
                                          const std::vector<double>& n_list) {
    if (traj.snapshots.empty())
        throw std::invalid_argument("freq_decay_scan: trajectory has no stored fields");
    for (double N : n_list)
        if (!(N >= 1.0))
            throw std::invalid_argument("freq_decay_scan: all N must be >= 1");
    const GridSpec& g = traj.grid;
    const Field2D chi1c =
        Field2D::sample(g, [](double x, double y) { return 1.0 - lp_theta(std::hypot(x, y)); });

    std::vector<FreqDecayRow> rows;
    for (double N : n_list) {
        FreqDecayRow row;
        row.N = N;
        for (size_t s = 0; s < traj.snapshots.size(); ++s) {
            Field2D band = lp_project(traj.snapshots[s].second, Band::Mid, N);
            if (s == 0) row.initial_band = std::sqrt(mass(band));
            kernels::map_inplace(band.values(), [&](long i, cplx v) { return v * chi1c[i].real(); });
            row.sup_exterior = std::max(row.sup_exterior, std::sqrt(mass(band)));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cqnls
