// Timing comparison of the OpenMP kernels against their serial references.
// The parallel paths are required to be bit-identical to the serial ones, so
// besides the timings this prints the max absolute difference (expect 0).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "sheetlab/parallel.hpp"
#include "sheetlab/potential.hpp"
#include "sheetlab/sampler.hpp"

using namespace sheetlab;

namespace {

using Clock = std::chrono::steady_clock;

template <class Fn>
double best_of(int repeats, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        fn();
        const double el =
            std::chrono::duration<double>(Clock::now() - t0).count();
        best = std::min(best, el);
    }
    return best;
}

void row(const char* name, const char* size, double serial_s, double par_s,
         double diff) {
    std::printf("%-26s %-14s %10.1f %10.1f %8.2fx %10.3g\n", name, size,
                serial_s * 1e3, par_s * 1e3,
                par_s > 0.0 ? serial_s / par_s : 0.0, diff);
}

std::vector<double> pilot_values(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t h = (i + 1) * 0x9e3779b97f4a7c15ULL;
        v[i] = static_cast<double>(h >> 11) / 9007199254740992.0 - 0.5;
    }
    return v;
}

}  // namespace

int main() {
    std::printf("workers resolved to %d\n\n", resolved_workers());
    std::printf("%-26s %-14s %10s %10s %9s %10s\n", "kernel", "size",
                "serial ms", "parallel ms", "speedup", "max diff");

    {
        const Grid g = Grid::uniform(GridSpec{1.0, 2.0, {768, 768}});
        const std::vector<double> master = pilot_values(g.total());
        std::vector<double> a = master, b = master;
        apply_min_kernel_transform_serial(g, a);
        apply_min_kernel_transform(g, b);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            diff = std::max(diff, std::abs(a[i] - b[i]));
        const double ts = best_of(3, [&] {
            std::vector<double> buf = master;
            apply_min_kernel_transform_serial(g, buf);
        });
        const double tp = best_of(3, [&] {
            std::vector<double> buf = master;
            apply_min_kernel_transform(g, buf);
        });
        row("min-kernel transform", "768x768", ts, tp, diff);
    }

    {
        const DiscreteMeasure mu =
            DiscreteMeasure::uniform(make_interval(0.0, 1.0, 2500));
        const KernelSpec ks = KernelSpec::riesz(
            0.5, DiagonalPolicy::cell_average, 1.0 / 2500);
        const double es = energy_serial(mu, ks);
        const double ep = energy(mu, ks);
        const double ts = best_of(3, [&] { energy_serial(mu, ks); });
        const double tp = best_of(3, [&] { energy(mu, ks); });
        row("pairwise energy", "2500 atoms", ts, tp, std::abs(es - ep));
    }

    {
        const Grid g = Grid::uniform(GridSpec{1.0, 2.0, {64, 64}});
        const int reps = 64;
        std::vector<double> out_s(reps), out_p(reps);
        auto one = [&](std::size_t r, std::vector<double>& out) {
            const FieldSample s = sample_sheet(g, 1, 99, r);
            out[r] = s.values[0][g.total() - 1];
        };
        const double ts = best_of(3, [&] {
            serial_for(reps, [&](std::size_t r) { one(r, out_s); });
        });
        const double tp = best_of(3, [&] {
            parallel_for(reps, [&](std::size_t r) { one(r, out_p); });
        });
        double diff = 0.0;
        for (int r = 0; r < reps; ++r)
            diff = std::max(diff, std::abs(out_s[r] - out_p[r]));
        row("replicate sweep", "64x64 x 64", ts, tp, diff);
    }

    {
        const DiscreteSet f = make_interval(0.0, 1.0, 512);
        const KernelSpec ks =
            KernelSpec::riesz(0.5, DiagonalPolicy::cell_average, 1.0 / 512);
        CapacityResult res;
        const double t = best_of(1, [&] { res = capacity(f, ks); });
        std::printf("\nequilibrium solve, 512 atoms: %.1f ms, %d iterations, "
                    "energy %.9g\n",
                    t * 1e3, res.iterations, res.energy);
    }
    return 0;
}
