#pragma once

#include <cstdint>

#include "cqnls/propagator.hpp"

namespace cqnls {

/// Quadrature plan for the principal-value kernel rho/(r^2 - rho^2) on the
/// truncated midpoint mesh: pv_log[i] holds the analytic
/// PV int_0^{r_max} d rho / (r_i^2 - rho^2) = ln((r_max+r_i)/(r_max-r_i))/(2 r_i).
struct PvKernelPlan {
    int m = 0;
    double dr = 0.0;
    std::vector<double> pv_log;
};

PvKernelPlan make_pv_plan(int m, double dr);

/// In/out projection [P^{+-} f](r) = f(r)/2 +- (i/pi) PV int f(rho) rho /
/// (r^2 - rho^2) d rho. The singularity is subtracted: the midpoint rule
/// integrates [f(rho) rho - f(r) r]/(r^2 - rho^2) (diagonal entry = its
/// removable limit), and the plan's analytic kernel integral restores the
/// f(r) r part. sign = +1 outgoing, -1 incoming.
RadialProfile inout_apply(const RadialProfile& f, int sign, const PvKernelPlan& plan);

/// P_N^{+-} = P^{+-} P_N: the profile is lifted to the grid, band-projected,
/// re-extracted on the same mesh, then split. Requires m*dr == half_width.
RadialProfile inout_band(const RadialProfile& f, double N, int sign, const GridSpec& g);

enum class MismatchKind {
    GradLowpassBetween = 1,  // chi_R^c  grad P_{<=N}  chi_{R/2}
    LowpassExteriorHighpass = 2,  // P_{<=N}  chi_R^c  P_{>4N}
};

struct MismatchOptions {
    double rel_tol = 1e-3;
    int max_sweeps = 200;
    bool drop_outer_cutoff = false;  // test hook: replace chi_R^c (or chi_R^c) by Id
    bool drop_inner_cutoff = false;  // test hook: replace chi_{R/2} (or P_{>4N}) by Id
    bool zero_operator = false;      // test hook
};

struct MismatchEstimate {
    double norm = 0.0;    // max over trials
    double spread = 0.0;  // max - min over trials
    int sweeps = 0;       // worst trial
};

/// Randomized L2->L2 operator-norm estimate by power iteration on T*T with
/// independent random restarts; throws if a trial fails to converge within
/// max_sweeps.
MismatchEstimate mismatch_norm(const GridSpec& g, MismatchKind kind, double R, double N,
                               int trials, uint64_t seed, const MismatchOptions& opt = {});

struct FreqDecayRow {
    double N = 0.0;
    double sup_exterior = 0.0;  // sup_t | chi_1^c P_N u(t) |_2 over stored snapshots
    double initial_band = 0.0;  // | P_N u_0 |_2
};

/// Requires the trajectory to carry snapshots (the first one is taken as
/// u_0). All N must be >= 1 and representable.
std::vector<FreqDecayRow> freq_decay_scan(const Trajectory& traj,
                                          const std::vector<double>& n_list);

}  // namespace cqnls
