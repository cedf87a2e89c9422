// Serial reference kernels against their OpenMP versions on a 2D operator.
// Prints one line per kernel: best-of-N time for each and the max deviation.
//
//   bench_kernels [resolution=256] [repeats=20] [threads=hardware]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include <omp.h>

#include "ithum/discretization.hpp"

using namespace ithum;

namespace {

double best_of(int repeats, const std::function<void()>& f)
{
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void report(const char* name, double ts, double tp, double dev)
{
    std::printf("%-14s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  max|diff| %.2e\n", name, 1e3 * ts,
                1e3 * tp, ts / tp, dev);
}

} // namespace

int main(int argc, char** argv)
{
    const int res = argc > 1 ? std::atoi(argv[1]) : 256;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;
    kernels::set_threads(argc > 3 ? std::atoi(argv[3]) : omp_get_max_threads());

    const auto domain = build_domain(2, {{0.0, 0.0}, {1.0, 1.0}}, {{0.25, 0.25}, {0.75, 0.75}}, res);
    const auto material = validate_material(domain, CoefficientField::identity_scaled(1.0),
                                            InterfaceCoefficient::constant(1.0));
    const auto ops = assemble(domain, material);
    const int n = ops.size();
    std::printf("grid %dx%d, %d dofs, %d nonzeros, %d threads\n", res, res, n, ops.K.nonzeros(), kernels::threads());

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> x(n), y(n), ys(n), yp(n), src(n);
    for (int i = 0; i < n; ++i) {
        x[i] = uni(rng);
        y[i] = uni(rng);
        src[i] = uni(rng);
    }
    const double dt2 = std::pow(0.5 * stable_dt(ops), 2);

    double ts = best_of(repeats, [&] { kernels::serial::spmv(ops.K, x, ys); });
    double tp = best_of(repeats, [&] { kernels::parallel::spmv(ops.K, x, yp); });
    report("spmv", ts, tp, max_diff(ys, yp));

    double ds = 0.0, dp = 0.0;
    ts = best_of(repeats, [&] { ds = kernels::serial::weighted_dot(ops.mass, x, y); });
    tp = best_of(repeats, [&] { dp = kernels::parallel::weighted_dot(ops.mass, x, y); });
    report("weighted_dot", ts, tp, std::abs(ds - dp));

    ys = y;
    yp = y;
    ts = best_of(repeats, [&] { kernels::serial::axpy(1e-3, x, ys); });
    tp = best_of(repeats, [&] { kernels::parallel::axpy(1e-3, x, yp); });
    report("axpy", ts, tp, max_diff(ys, yp));

    ts = best_of(repeats, [&] { kernels::serial::leapfrog_step(ops.K, ops.inv_mass, dt2, x, y, src, ys); });
    tp = best_of(repeats, [&] { kernels::parallel::leapfrog_step(ops.K, ops.inv_mass, dt2, x, y, src, yp); });
    report("leapfrog_step", ts, tp, max_diff(ys, yp));
    return 0;
}
