// Compares the OpenMP kernels against the serial reference implementations
// on fixed workloads and checks the results are bitwise identical (the
// stratified combiners are thread-count independent by construction).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <omp.h>
#include <vector>

#include "ulab/gowers.hpp"
#include "ulab/mult_sieve.hpp"
#include "ulab/patterns.hpp"

using namespace ulab;

namespace {

template <typename F>
double time_s(F&& body) {
    auto t0 = std::chrono::steady_clock::now();
    body();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", omp_get_max_threads());
    int mismatches = 0;

    std::printf("averaged interval Gowers norm, serial reference vs OpenMP kernel\n");
    std::printf("%10s %6s %3s %8s | %10s %10s %8s %s\n", "X", "H", "k", "samples", "serial_s",
                "openmp_s", "speedup", "bitwise");
    struct Case {
        long long X, H;
        int k, samples;
    };
    const Case cases[] = {
        {100000, 101, 1, 200},
        {1000000, 252, 1, 100},
        {10000, 40, 2, 100},
        {100000, 101, 2, 10},
    };
    for (const Case& c : cases) {
        FunctionTable lam = sieve_table(MultSpec::liouville(), 1, 2 * c.X + c.H + 1);
        AveragedGowers serial, par;
        const double ts = time_s([&] {
            serial = averaged_gowers(lam, c.X, c.H, c.k, c.samples, 1, 1e12, /*parallel=*/false);
        });
        const double tp = time_s([&] {
            par = averaged_gowers(lam, c.X, c.H, c.k, c.samples, 1, 1e12, /*parallel=*/true);
        });
        const bool same = serial.mean_norm == par.mean_norm &&
                          serial.stderr_mean == par.stderr_mean &&
                          serial.stratum_values == par.stratum_values;
        if (!same) ++mismatches;
        std::printf("%10lld %6lld %3d %8d | %10.3f %10.3f %8.2f %s\n", c.X, c.H, c.k, c.samples,
                    ts, tp, ts / tp, same ? "yes" : "NO");
    }

    std::printf("\nchowla short average, 1 thread vs all threads (OpenMP inner loop)\n");
    std::printf("%10s %8s | %10s %10s %8s %s\n", "X", "eps", "1thread_s", "allthr_s", "speedup",
                "bitwise");
    for (long long X : {100000LL, 1000000LL}) {
        const double eps = 0.3;
        const long long M = (long long)std::pow((double)X, eps);
        FunctionTable lam = sieve_table(MultSpec::liouville(), 1, X + M + 1);
        CorrelationResult one, all;
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        const double t1 = time_s([&] { one = chowla_average(lam, {0, 1}, X, eps); });
        omp_set_num_threads(saved);
        const double ta = time_s([&] { all = chowla_average(lam, {0, 1}, X, eps); });
        const bool same = one.value == all.value && one.boundary_loss == all.boundary_loss;
        if (!same) ++mismatches;
        std::printf("%10lld %8.2f | %10.3f %10.3f %8.2f %s\n", X, eps, t1, ta, t1 / ta,
                    same ? "yes" : "NO");
    }

    std::printf("\n%s\n", mismatches == 0 ? "all serial/parallel value pairs bitwise identical"
                                          : "MISMATCH between serial and parallel kernels");
    return mismatches;
}
