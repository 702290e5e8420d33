#include "cqnls/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqnls {

Field2D nonlinear_phase(const Field2D& u, double dt) {
    if (!u.all_finite()) throw std::invalid_argument("nonlinear_phase: non-finite field");
    Field2D w = u;
    kernels::map_inplace(w.values(), [dt](long, cplx v) {
        const double a2 = std::norm(v);
        const double ph = dt * (a2 - a2 * a2);
        return v * cplx{std::cos(ph), std::sin(ph)};
    });
    return w;
}

Field2D strang_step(const Field2D& u, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("strang_step: dt must be positive");
    return nonlinear_phase(linear_flow(nonlinear_phase(u, dt / 2.0), dt), dt / 2.0);
}

double h1_norm(const Field2D& u) { return std::sqrt(mass(u) + 2.0 * kinetic_energy(u)); }

namespace {

struct Monitor {
    WeightPair w1;
    double r2;
    double mass_q;
    double conc_eps;

    DiagnosticsRecord record(double t, const Field2D& u, double l4tx, const Gradient& gr) const {
        DiagnosticsRecord r;
        r.t = t;
        const GridSpec& g = u.spec();
        const double h = g.spacing();
        r.mass = mass(u);
        r.kinetic = 0.5 * h * h *
                    kernels::reduce_indexed(u.size(), [&](long i) {
                        return std::norm(gr.dx[i]) + std::norm(gr.dy[i]);
                    });
        r.l4_4 = lp_pow(u, 4);
        r.l6_6 = lp_pow(u, 6);
        r.energy = r.kinetic - 0.25 * r.l4_4 + r.l6_6 / 6.0;
        r.linf = sup_norm(u);
        r.weighted_sup = weighted_radial_sup(u);
        r.l4tx_accum = l4tx;
        if (r.mass > 0.0 && r.kinetic > 0.0) {
            r.gn_ratio = r.l4_4 * mass_q / (2.0 * r.mass * 2.0 * r.kinetic);
            r.lambda = concentration_scale(u, conc_eps).lambda;
            r.virial_A = virial_A(u, w1, gr);
            r.virial_rate = virial_rate(u, w1, gr);
            r.ext_kin_r1 = exterior_kinetic(u, w1.radius, gr);
            r.ext_kin_r2 = exterior_kinetic(u, r2, gr);
        }
        return r;
    }
};

}  // namespace

Trajectory evolve(const Field2D& u0, const RunConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0))
        throw std::invalid_argument("evolve: T and dt must be positive");
    if (cfg.cadence < 1) throw std::invalid_argument("evolve: cadence must be >= 1");
    if (!u0.all_finite()) throw std::invalid_argument("evolve: non-finite initial field");

    const GridSpec& g = u0.spec();
    const FftEngine& eng = FftEngine::get(g.n);
    const int n = g.n;
    const long steps = std::llround(cfg.T / cfg.dt);

    Trajectory traj;
    traj.grid = g;
    traj.config = cfg;

    Monitor mon{make_weights(g, cfg.radii[0]), cfg.radii[1], cfg.mass_q, cfg.conc_eps};

    // cached per-mode linear symbol in the transformed (transposed) layout
    std::vector<cplx, AlignedAlloc<cplx>> lin_sym(static_cast<size_t>(g.size()));
    kernels::map_inplace({lin_sym.data(), lin_sym.size()}, [&](long i, cplx) {
        const double kx = g.freq(static_cast<int>(i % n)), ky = g.freq(static_cast<int>(i / n));
        const double wph = cfg.dt * (kx * kx + ky * ky);
        return cplx{std::cos(wph), -std::sin(wph)};
    });

    // sponge factor exp(-dt gamma w(x)), w ramping 0 -> 1 over the outer 10%
    std::vector<double> absorb;
    if (cfg.absorber) {
        const double ra = 0.9 * g.half_width;
        absorb.resize(static_cast<size_t>(g.size()));
        #pragma omp parallel for schedule(static)
        for (long i = 0; i < g.size(); ++i) {
            const double x = g.x(static_cast<int>(i / n)), y = g.x(static_cast<int>(i % n));
            const double r = std::hypot(x, y);
            const double s = 1.0 + std::max(r - ra, 0.0) / (g.half_width - ra);
            absorb[static_cast<size_t>(i)] =
                std::exp(-cfg.dt * cfg.absorber_strength * (1.0 - lp_theta(s)));
        }
    }

    Field2D u = u0;
    double l4tx = 0.0;
    double prev_l44 = lp_pow(u, 4);
    double prev_t = 0.0;
    double max_tail = 0.0;
    {
        const Gradient gr0 = gradient(u);
        traj.records.push_back(mon.record(0.0, u, 0.0, gr0));
        if (cfg.on_record) cfg.on_record(0.0, u, gr0);
    }

    size_t next_snap = 0;
    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    auto maybe_snapshot = [&](double t) {
        while (next_snap < snaps.size() && t >= snaps[next_snap] - cfg.dt / 2.0) {
            traj.snapshots.emplace_back(snaps[next_snap], u);
            ++next_snap;
        }
    };
    maybe_snapshot(0.0);

    const double half = cfg.dt / 2.0;
    for (long s = 1; s <= steps; ++s) {
        if (!cfg.nonlinearity_off)
            kernels::map_inplace(u.values(), [half](long, cplx v) {
                const double a2 = std::norm(v);
                const double ph = half * (a2 - a2 * a2);
                return v * cplx{std::cos(ph), std::sin(ph)};
            });
        eng.forward(u.data());
        kernels::map_inplace(u.values(), [&](long i, cplx v) { return v * lin_sym[static_cast<size_t>(i)]; });
        eng.inverse(u.data());
        if (!cfg.nonlinearity_off)
            kernels::map_inplace(u.values(), [half](long, cplx v) {
                const double a2 = std::norm(v);
                const double ph = half * (a2 - a2 * a2);
                return v * cplx{std::cos(ph), std::sin(ph)};
            });
        if (cfg.absorber)
            kernels::map_inplace(u.values(), [&](long i, cplx v) { return v * absorb[static_cast<size_t>(i)]; });

        const double t = static_cast<double>(s) * cfg.dt;
        if (s % cfg.cadence == 0 || s == steps) {
            if (!u.all_finite()) {
                traj.aborted_nan = true;
                traj.warnings.push_back("NaN detected at t = " + std::to_string(t) +
                                        "; run aborted at the last good record");
                break;
            }
            const double l44 = lp_pow(u, 4);
            l4tx += 0.5 * (l44 + prev_l44) * (t - prev_t);
            prev_l44 = l44;
            prev_t = t;
            const Gradient gr = gradient(u);
            traj.records.push_back(mon.record(t, u, l4tx, gr));
            if (cfg.on_record) cfg.on_record(t, u, gr);
            max_tail = std::max(max_tail, spectral_tail_fraction(u));
        }
        maybe_snapshot(t);
    }
    if (max_tail > cfg.alias_warn)
        traj.warnings.push_back("aliasing: spectral tail fraction reached " +
                                std::to_string(max_tail));
    traj.final_field = std::move(u);
    return traj;
}

ScatteringMetrics scattering_metrics(const Trajectory& traj, int n_windows) {
    if (traj.records.size() < 3)
        throw std::invalid_argument("scattering_metrics: need at least 3 monitored times");
    if (n_windows < 1) throw std::invalid_argument("scattering_metrics: need >= 1 window");
    const double T = traj.records.back().t;

    auto snapshot_at = [&](double t) -> const Field2D& {
        for (const auto& [ts, f] : traj.snapshots)
            if (std::abs(ts - t) <= traj.config.dt) return f;
        throw std::invalid_argument("scattering_metrics: missing snapshot at t = " +
                                    std::to_string(t));
    };
    auto accum_at = [&](double t) {
        const DiagnosticsRecord* best = nullptr;
        for (const auto& r : traj.records)
            if (!best || std::abs(r.t - t) < std::abs(best->t - t)) best = &r;
        return best->l4tx_accum;
    };

    ScatteringMetrics m;
    for (int k = n_windows; k >= 1; --k) {
        const double a = T / std::pow(2.0, k), b = T / std::pow(2.0, k - 1);
        m.windows.emplace_back(a, b);
        const Field2D va = linear_flow(snapshot_at(a), -a);
        const Field2D vb = linear_flow(snapshot_at(b), -b);
        Field2D diff = vb;
        for (long i = 0; i < diff.size(); ++i) diff[i] -= va[i];
        m.cauchy_h1.push_back(h1_norm(diff));
        m.l4tx_increment.push_back(accum_at(b) - accum_at(a));
    }
    return m;
}

}  // namespace cqnls
