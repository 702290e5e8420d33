// Times the OpenMP kernels against their serial reference twins and checks
// that both produce identical bits (the reductions use a fixed pairwise tree,
// so thread count must not change results).
#include <chrono>
#include <cstdio>

#include <omp.h>

#include "cqnls/fft.hpp"
#include "cqnls/functionals.hpp"
#include "cqnls/rng.hpp"

using namespace cqnls;

namespace {

double now() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <class F>
double time_best(F&& f, int reps = 5) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now();
        f();
        best = std::min(best, now() - t0);
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 512;
    const GridSpec g = make_grid(n, 20.0);
    const FftEngine& eng = FftEngine::get(n);
    Field2D u = random_smooth_field(g, 42);

    std::printf("kernel benchmark, n = %d, omp threads = %d\n", n, omp_get_max_threads());
    std::printf("%-26s %12s %12s %8s %s\n", "kernel", "serial [ms]", "omp [ms]", "speedup",
                "bit-identical");

    // fft roundtrip
    Field2D a = u, b = u;
    const double ts = time_best([&] {
        eng.forward_serial(a.data());
        eng.inverse_serial(a.data());
    });
    const double tp = time_best([&] {
        eng.forward(b.data());
        eng.inverse(b.data());
    });
    bool same = true;
    for (long i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) same = false;
    std::printf("%-26s %12.3f %12.3f %8.2f %s\n", "fft roundtrip", ts * 1e3, tp * 1e3, ts / tp,
                same ? "yes" : "NO");

    // pointwise phase
    auto phase = [](long, cplx v) {
        const double a2 = std::norm(v);
        const double ph = 1e-3 * (a2 - a2 * a2);
        return v * cplx{std::cos(ph), std::sin(ph)};
    };
    a = u;
    b = u;
    const double ps = time_best([&] { kernels::map_inplace_serial(a.values(), phase); });
    const double pp = time_best([&] { kernels::map_inplace(b.values(), phase); });
    same = true;
    for (long i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) same = false;
    std::printf("%-26s %12.3f %12.3f %8.2f %s\n", "nonlinear phase", ps * 1e3, pp * 1e3, ps / pp,
                same ? "yes" : "NO");

    // quadrature reduction
    double rs = 0.0, rp = 0.0;
    const double qs = time_best([&] {
        rs = kernels::reduce_indexed_serial(u.size(), [&](long i) { return std::norm(u[i]); });
    });
    const double qp = time_best([&] {
        rp = kernels::reduce_indexed(u.size(), [&](long i) { return std::norm(u[i]); });
    });
    std::printf("%-26s %12.3f %12.3f %8.2f %s\n", "pairwise mass reduction", qs * 1e3, qp * 1e3,
                qs / qp, rs == rp ? "yes" : "NO");

    // full diagnostics-grade functional
    const double es = time_best([&] { (void)energy(u); });
    std::printf("%-26s %12s %12.3f %8s %s\n", "energy functional", "-", es * 1e3, "-", "-");
    return 0;
}
