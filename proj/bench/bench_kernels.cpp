// Serial vs OpenMP timings of the batch kernels; each pair must agree exactly.

#include "carleman/extend.hpp"
#include "carleman/outerflat.hpp"
#include "carleman/weights.hpp"

#include <chrono>
#include <cstdio>
#include <omp.h>

using namespace carleman;

namespace {

template <class F>
double seconds(F&& f, int reps = 1)
{
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i)
        f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void line(const char* name, double serial, double parallel, bool same)
{
    std::printf("%-22s serial %9.4f s  openmp %9.4f s  speedup %5.2f  %s\n", name, serial, parallel,
                serial / parallel, same ? "identical" : "MISMATCH");
}

} // namespace

int main()
{
    std::printf("threads: %d\n", omp_get_max_threads());
    const auto M = make_sequence(FamilySpec::gevrey(1.0), 16384);

    {
        auto t = resolvable_t_grid(M, 200000);
        std::vector<double> a, b;
        const double s = seconds([&] { a = log_hM_batch_serial(M, t); }, 5);
        const double p = seconds([&] { b = log_hM_batch(M, t); }, 5);
        line("log_hM batch 2e5", s, p, a == b);
    }
    {
        ModerateGrowthFit a, b;
        const double s = seconds([&] { a = moderate_growth_serial(M, 4096); });
        const double p = seconds([&] { b = moderate_growth(M, 4096); });
        line("moderate growth 4096", s, p, a.log_A == b.log_A && a.min_excess == b.min_excess);
    }
    const auto M4 = make_sequence(FamilySpec::gevrey(1.0), 4096);
    const auto h = build_flat(M4, 0.5, known_gamma(1.0));
    {
        auto z = sector_samples(0.5, 400, 1e-3, 1.0, 1);
        std::vector<std::complex<double>> a, b;
        const double s = seconds([&] { a = eval_flat_batch_serial(h, z); });
        const double p = seconds([&] { b = eval_flat_batch(h, z); });
        line("eval_flat batch 400", s, p, a == b);
    }
    {
        std::vector<std::complex<double>> lambda{1.0, -2.0, 0.5, 3.0};
        Jet l(lambda, M4, 1.0);
        auto e = extend_damped(l, 0.5, known_gamma(1.0));
        RemainderFn R = [&](const SectorPoint& z, int N) { return e.remainder_scaled(z, N); };
        auto radii = default_z_schedule();
        std::vector<std::vector<Remainder>> a, b;
        const double s = seconds([&] { a = remainder_table_serial(R, 12, 0.3, radii); }, 20);
        const double p = seconds([&] { b = remainder_table(R, 12, 0.3, radii); }, 20);
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            for (std::size_t k = 0; same && k < a[i].size(); ++k)
                same = a[i][k].value == b[i][k].value && a[i][k].scale == b[i][k].scale;
        line("remainder table", s, p, same);
    }
    return 0;
}
