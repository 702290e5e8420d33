// Acceptance suite: one pass/fail line per criterion, shared heavy artifacts,
// nonzero exit if anything fails. Budgeted for a commodity multicore desktop.
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <vector>

#include "cqnls/ground_state.hpp"
#include "cqnls/inout.hpp"
#include "cqnls/propagator.hpp"
#include "cqnls/rng.hpp"
#include "cqnls/scenario.hpp"

using namespace cqnls;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s  (%s)\n", pass ? "PASS" : "FAIL", criterion, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

Field2D scaled(const Field2D& u, double s) {
    Field2D v = u;
    kernels::map_inplace(v.values(), [s](long, cplx z) { return s * z; });
    return v;
}

Field2D conj_field(const Field2D& u) {
    Field2D v = u;
    kernels::map_inplace(v.values(), [](long, cplx z) { return std::conj(z); });
    return v;
}

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-12});
}

}  // namespace

int main() {
    const double t_start = now_s();

    // ---- shared ground states and the independent radial oracle ----
    const double t_gs = now_s();
    const GridSpec g20 = make_grid(512, 20.0);
    const GroundStateResult gs20 = petviashvili(g20, 1e-10, 500);
    const RadialProfile oracle = shooting_oracle(15.0, 1e-3, 1e-6);
    const double gs_runtime = now_s() - t_gs;

    // 1. ground-state oracle agreement -----------------------------------
    {
        const double oracle_mass = profile_mass(oracle);
        double sup_diff = 0.0;
        for (int ix = 0; ix < g20.n; ix += 2)
            for (int iy = 0; iy < g20.n; iy += 2) {
                const double r = std::hypot(g20.x(ix), g20.x(iy));
                if (r > 14.0) continue;
                sup_diff = std::max(sup_diff,
                                    std::abs(gs20.q.at(ix, iy).real() - oracle.interp(r).real()));
            }
        const bool pass = gs20.iterations < 500 &&
                          std::abs(gs20.mass_q - oracle_mass) <= 1e-3 * oracle_mass &&
                          sup_diff <= 1e-4 && gs_runtime < 30.0;
        report(1, "ground-state oracle agreement", pass,
               fmt("iters=%d  M_grid=%.6f  M_oracle=%.6f  sup_diff=%.2e  runtime=%.1fs",
                   gs20.iterations, gs20.mass_q, oracle_mass, sup_diff, gs_runtime));
    }

    // 2. Pohozaev suite ---------------------------------------------------
    {
        const PohozaevResiduals r = pohozaev_check(gs20);
        const bool pass = r.grad_mass <= 1e-6 && r.l4_mass <= 1e-6 && r.energy_l6 <= 1e-6;
        report(2, "Pohozaev identities", pass,
               fmt("grad/mass=%.2e  l4/mass=%.2e  energy/l6=%.2e", r.grad_mass, r.l4_mass,
                   r.energy_l6));
    }

    // 3. sharp Gagliardo-Nirenberg ----------------------------------------
    {
        const double at_q = gn_ratio(gs20.q, gs20.mass_q);
        double worst = 0.0;
        const GridSpec g256 = make_grid(256, 20.0);
        for (int k = 0; k < 100; ++k)
            worst = std::max(worst,
                             gn_ratio(random_smooth_field(g256, 4242 + static_cast<uint64_t>(k)),
                                      gs20.mass_q));
        const bool pass = std::abs(at_q - 1.0) <= 1e-4 && worst <= 1.0 + 1e-6;
        report(3, "sharp Gagliardo-Nirenberg ratio", pass,
               fmt("ratio(Q)=%.8f  max over 100 random fields=%.8f", at_q, worst));
    }

    // 4. propagator order, conservation, reversal --------------------------
    {
        const double t0 = now_s();
        const GridSpec g128 = make_grid(128, 10.0);
        const Field2D bump = Field2D::sample(
            g128, [](double x, double y) { return 1.3 * std::exp(-(x * x + y * y) / 2.0); });
        const double e0 = energy(bump);
        auto drift = [&](double dt) {
            Field2D u = bump;
            const long n = std::lround(1.0 / dt);
            for (long s = 0; s < n; ++s) u = strang_step(u, dt);
            return std::abs(energy(u) - e0);
        };
        const double ratio = drift(4e-3) / drift(2e-3);

        Field2D u = scaled(bump, 1.2 / 1.3);
        const double m0 = mass(u);
        for (int s = 0; s < 10000; ++s) u = strang_step(u, 1e-3);
        const double mass_drift = std::abs(mass(u) - m0) / m0;

        const GridSpec g256 = make_grid(256, 10.0);
        const Field2D r0 = Field2D::sample(
            g256, [](double x, double y) { return 1.2 * std::exp(-(x * x + y * y) / 2.0); });
        Field2D v = r0;
        for (int s = 0; s < 1000; ++s) v = strang_step(v, 1e-3);
        v = conj_field(v);
        for (int s = 0; s < 1000; ++s) v = strang_step(v, 1e-3);
        v = conj_field(v);
        double err2 = 0.0;
        const double h2 = g256.spacing() * g256.spacing();
        for (long i = 0; i < v.size(); ++i) err2 += std::norm(v[i] - r0[i]) * h2;
        const double rev = std::sqrt(err2);
        const double runtime = now_s() - t0;

        const bool pass = ratio >= 3.5 && ratio <= 4.5 && mass_drift <= 1e-10 && rev <= 1e-8 &&
                          runtime < 120.0;
        report(4, "propagator order and conservation", pass,
               fmt("richardson=%.2f  mass_drift=%.2e  reversal_L2=%.2e  runtime=%.0fs", ratio,
                   mass_drift, rev, runtime));
    }

    // ---- threshold artifacts on the production box ----------------------
    const GridSpec g40 = make_grid(512, 40.0);
    const GroundStateResult gs40 = petviashvili(g40, 1e-10, 500);

    auto threshold_run = [&](double dt) {
        RunConfig rc;
        rc.dt = dt;
        rc.T = 40.0;
        rc.cadence = static_cast<int>(std::lround(0.2 / dt));
        rc.radii = {5.0, 10.0};
        rc.mass_q = gs40.mass_q;
        rc.absorber = true;
        rc.snapshot_times = {0.0, 5.0, 10.0, 20.0, 22.5, 25.0, 27.5, 30.0, 32.5, 35.0, 37.5, 40.0};
        const Field2D u0 = scaled(gs40.q, std::sqrt(gs40.mass_q / mass(gs40.q)));
        return evolve(u0, rc);
    };
    const Trajectory thr = threshold_run(0.002);

    // 5. virial identity along a stored conservative trajectory ------------
    {
        RunConfig rc;
        rc.dt = 0.002;
        rc.T = 2.0;
        rc.cadence = 50;
        rc.radii = {5.0, 10.0};
        rc.mass_q = gs40.mass_q;
        for (int k = 1; k <= 20; ++k) rc.snapshot_times.push_back(0.1 * k);
        const Trajectory traj = evolve(scaled(gs40.q, std::sqrt(0.9)), rc);
        double worst = 0.0;
        for (double R : {5.0, 10.0}) {
            const WeightPair w = make_weights(g40, R);
            for (const auto& [ts, f] : traj.snapshots) {
                const Field2D up = strang_step(f, rc.dt);
                const Field2D um = conj_field(strang_step(conj_field(f), rc.dt));
                const double fd = (virial_A(up, w) - virial_A(um, w)) / (2.0 * rc.dt);
                const double rate = virial_rate(f, w);
                worst = std::max(worst, std::abs(fd - rate) / std::abs(fd));
            }
        }
        report(5, "virial identity dA/dt", worst <= 1e-4,
               fmt("max rel deviation over 20 times x {R=5,10} = %.2e", worst));
    }

    // 6. Morawetz quotient surrogate ---------------------------------------
    {
        const std::vector<double> Rs{5.0, 10.0, 20.0};
        struct Acc {
            Field2D chi;
            double integral = 0.0, prev = 0.0, at40 = 0.0;
            bool have_prev = false, have40 = false;
        };
        std::vector<Acc> accs;
        for (double R : Rs) accs.push_back({radial_cutoff(g40, R), 0, 0, 0, false, false});
        const double h2 = g40.spacing() * g40.spacing();
        double prev_t = 0.0;

        RunConfig rc;
        rc.dt = 0.004;
        rc.T = 80.0;
        rc.cadence = 25;
        rc.radii = {5.0, 10.0};
        rc.mass_q = gs40.mass_q;
        rc.absorber = true;
        rc.on_record = [&](double t, const Field2D& u, const Gradient& gr) {
            for (auto& a : accs) {
                const double val = h2 * kernels::reduce_indexed(u.size(), [&](long i) {
                    const double a2 = std::norm(u[i]);
                    return a.chi[i].real() * (std::norm(gr.dx[i]) + std::norm(gr.dy[i])) -
                           0.5 * a2 * a2 + (2.0 / 3.0) * a2 * a2 * a2;
                });
                if (a.have_prev) a.integral += 0.5 * (val + a.prev) * (t - prev_t);
                a.prev = val;
                a.have_prev = true;
                if (!a.have40 && t >= 40.0 - 1e-9) {
                    a.at40 = a.integral;
                    a.have40 = true;
                }
            }
            prev_t = t;
        };
        evolve(scaled(gs40.q, std::sqrt(0.9)), rc);

        double max40 = 0.0, max80 = 0.0;
        for (size_t i = 0; i < Rs.size(); ++i) {
            max40 = std::max(max40, accs[i].at40 / (Rs[i] + 40.0 / Rs[i]));
            max80 = std::max(max80, accs[i].integral / (Rs[i] + 80.0 / Rs[i]));
        }
        const bool pass = std::isfinite(max40) && std::isfinite(max80) && max80 <= 1.05 * max40;
        report(6, "Morawetz bound surrogate", pass,
               fmt("max quotient T=40: %.4f  T=80: %.4f", max40, max80));
    }

    // 7. threshold dispersal, stable under dt/2 -----------------------------
    std::vector<double> thr_metrics;
    {
        auto metrics_of = [&](const Trajectory& t) {
            std::vector<double> m;
            m.push_back(t.records.back().linf / t.records.front().linf);
            const ScatteringMetrics sm = scattering_metrics(t, 3);
            for (double v : sm.l4tx_increment) m.push_back(v);
            for (double v : sm.cauchy_h1) m.push_back(v);
            return m;
        };
        auto decreasing = [](const double* v, int n) {
            for (int i = 1; i < n; ++i)
                if (v[i] >= v[i - 1]) return false;
            return true;
        };
        thr_metrics = metrics_of(thr);
        const Trajectory thr_fine = threshold_run(0.001);
        const std::vector<double> fine = metrics_of(thr_fine);
        bool stable = true;
        double worst_rel = 0.0;
        for (size_t i = 0; i < thr_metrics.size(); ++i) {
            if (!rel_close(thr_metrics[i], fine[i], 0.05)) stable = false;
            worst_rel = std::max(worst_rel, std::abs(thr_metrics[i] - fine[i]) /
                                                std::max(std::abs(fine[i]), 1e-12));
        }
        const bool structure = thr_metrics[0] <= 0.5 && decreasing(&thr_metrics[1], 3) &&
                               decreasing(&thr_metrics[4], 3);
        report(7, "threshold dispersal surrogate", structure && stable,
               fmt("sup_ratio=%.3f  l4tx=[%.3f %.3f %.3f]  cauchy=[%.2f %.2f %.2f]  dt/2 max rel "
                   "diff=%.3f",
                   thr_metrics[0], thr_metrics[1], thr_metrics[2], thr_metrics[3], thr_metrics[4],
                   thr_metrics[5], thr_metrics[6], worst_rel));
    }

    // 8. frequency decay ----------------------------------------------------
    {
        const GridSpec g1k = make_grid(1024, 20.0);
        const GroundStateResult q1k = petviashvili(g1k, 1e-10, 500);
        Field2D u0 = q1k.q;
        const Field2D pert = Field2D::sample(
            g1k, [](double x, double y) { return 0.1 * std::exp(-(x * x + y * y) / 18.0); });
        for (long i = 0; i < u0.size(); ++i) u0[i] += pert[i];
        u0 = scaled(u0, std::sqrt(q1k.mass_q / mass(u0)));

        RunConfig rc;
        rc.dt = 0.004;
        rc.T = 8.0;
        rc.cadence = 125;
        rc.radii = {5.0, 8.0};
        rc.mass_q = q1k.mass_q;
        rc.absorber = true;
        for (int k = 0; k <= 16; ++k) rc.snapshot_times.push_back(8.0 * k / 16.0);
        const Trajectory traj = evolve(u0, rc);
        const auto rows = freq_decay_scan(traj, {8.0, 16.0, 32.0});
        const double cfit =
            rows[0].sup_exterior / (rows[0].initial_band + std::pow(rows[0].N, -1.2));
        bool pass = true;
        for (size_t i = 1; i < rows.size(); ++i)
            pass = pass && rows[i].sup_exterior <=
                               cfit * (rows[i].initial_band + std::pow(rows[i].N, -1.2));
        report(8, "frequency decay", pass,
               fmt("sup[8,16,32]=[%.2e %.2e %.2e]  C=%.3e", rows[0].sup_exterior,
                   rows[1].sup_exterior, rows[2].sup_exterior, cfit));
    }

    // 9. in/out decomposition ------------------------------------------------
    {
        auto battery = [&](int m) {
            const double dr = 20.0 / m;
            const PvKernelPlan plan = make_pv_plan(m, dr);
            double worst_recon = 0.0, max_ratio = 0.0;
            for (int k = 0; k < 200; ++k) {
                const RadialProfile f =
                    random_bandlimited_profile(m, dr, 9000 + static_cast<uint64_t>(k));
                const RadialProfile fp = inout_apply(f, +1, plan);
                const RadialProfile fm = inout_apply(f, -1, plan);
                RadialProfile resid = RadialProfile::midpoint_mesh(m, dr);
                for (int j = 0; j < m; ++j)
                    resid.f[static_cast<size_t>(j)] = fp.f[static_cast<size_t>(j)] +
                                                      fm.f[static_cast<size_t>(j)] -
                                                      f.f[static_cast<size_t>(j)];
                const double fn = f.l2_norm();
                worst_recon = std::max(worst_recon, resid.l2_norm() / fn);
                max_ratio = std::max(max_ratio,
                                     std::max(fp.l2_norm(), fm.l2_norm()) / fn);
            }
            return std::make_pair(worst_recon, max_ratio);
        };
        const auto [recon_coarse, ratio_coarse] = battery(1024);
        const auto [recon_fine, ratio_fine] = battery(2048);
        const double stability = std::abs(ratio_fine - ratio_coarse) / ratio_coarse;

        const Field2D chirp = Field2D::sample(g40, [](double x, double y) {
            const double r = std::hypot(x, y);
            const double amp = std::exp(-(r - 16.0) * (r - 16.0) / 4.0);
            return cplx{amp * std::cos(r * r / 4.0), amp * std::sin(r * r / 4.0)};
        });
        const Field2D moved = linear_flow(chirp, 1.0);
        const RadialProfile prof = radial_average(moved, g40.n / 2).profile;
        const double frac =
            inout_band(prof, 8.0, -1, g40).l2_norm() / inout_band(prof, 8.0, +1, g40).l2_norm();

        const bool pass = recon_coarse <= 1e-13 && recon_fine <= 1e-13 && stability <= 0.10 &&
                          frac <= 0.2;
        report(9, "in/out decomposition", pass,
               fmt("recon=%.1e/%.1e  norm=%.4f->%.4f (%.1f%%)  chirp incoming frac=%.3f",
                   recon_coarse, recon_fine, ratio_coarse, ratio_fine, 100.0 * stability, frac));
    }

    // 10. mismatch decay ------------------------------------------------------
    {
        const GridSpec g256 = make_grid(256, 40.0);
        std::vector<double> est;
        for (double R : {4.0, 8.0, 16.0})
            est.push_back(
                mismatch_norm(g256, MismatchKind::GradLowpassBetween, R, 4.0, 8, 20250809).norm);
        const bool pass = est[1] <= est[0] / 4.0 && est[2] <= est[1] / 4.0;
        report(10, "mismatch decay in R", pass,
               fmt("estimates R={4,8,16}: %.3e %.3e %.3e  factors %.1f %.1f", est[0], est[1],
                   est[2], est[0] / est[1], est[1] / est[2]));
    }

    // 11. localization / evacuation joint report ------------------------------
    {
        auto lambda_at = [&](double t) {
            const DiagnosticsRecord* best = nullptr;
            for (const auto& r : thr.records)
                if (!best || std::abs(r.t - t) < std::abs(best->t - t)) best = &r;
            return best->lambda;
        };
        const std::vector<double> times{20.0, 22.5, 25.0, 27.5, 30.0, 32.5, 35.0, 37.5, 40.0};
        const std::vector<double> cs{0.5, 1.0, 2.0, 4.0};
        double chosen_c = 0.0;
        std::vector<double> evac_series;
        bool localized = false;
        for (double C : cs) {
            double sup_ratio = 0.0;
            std::vector<double> le;
            for (double t : times) {
                const Field2D* f = nullptr;
                for (const auto& [ts, snap] : thr.snapshots)
                    if (std::abs(ts - t) <= thr.config.dt) f = &snap;
                if (!f) continue;
                const Gradient gr = gradient(*f);
                const double h2 = g40.spacing() * g40.spacing();
                const double kin = h2 * kernels::reduce_indexed(f->size(), [&](long i) {
                    return std::norm(gr.dx[i]) + std::norm(gr.dy[i]);
                });
                const double R = C * lambda_at(t);
                sup_ratio = std::max(sup_ratio, exterior_kinetic(*f, R, gr) / kin);
                le.push_back(local_energy(*f, R));
            }
            if (!localized && sup_ratio < 0.05) {
                localized = true;
                chosen_c = C;
                evac_series = le;
            }
        }
        const double e0 = thr.records.front().energy;
        const double floor6 = thr.records.front().l6_6 / 6.0;
        const double floor_resid = std::abs(e0 - floor6) / e0;
        bool evac_ok = false;
        if (!evac_series.empty()) {
            evac_ok = evac_series.back() <= evac_series.front() &&
                      *std::min_element(evac_series.begin(), evac_series.end()) <= e0;
            for (size_t i = 1; i < evac_series.size(); ++i)
                if (evac_series[i] > evac_series[i - 1] * 1.05 + 1e-9) evac_ok = false;
        }
        const bool pass = localized && evac_ok && floor_resid <= 1e-6;
        std::string series;
        for (double v : evac_series) series += fmt("%.3f ", v);
        report(11, "localization/evacuation joint report", pass,
               fmt("C=%.1f  evac LE=[%s]  floor resid=%.2e", chosen_c, series.c_str(),
                   floor_resid));
    }

    std::printf("acceptance total wall clock: %.0f s; %d failure(s)\n", now_s() - t_start,
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
