#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

#include "qklab/assemble.hpp"
#include "qklab/construction.hpp"
#include "qklab/grid.hpp"
#include "qklab/sparse.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double time_ms(int reps, const std::function<void()>& f) {
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) f();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 24;
    int reps = argc > 2 ? std::atoi(argv[2]) : 20;

    qklab::ConstructionSpec spec = qklab::preset_t4_d1();
    auto [V, W] = qklab::build_construction(spec);
    qklab::PeriodicGrid grid(spec.ambient_dim, n);
    qklab::SparseMatrix A = qklab::assemble_sub_laplacian(grid, {V, W});

    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(A.cols());
    for (double& v : x) v = gauss(rng);

    // warm up and check agreement
    std::vector<double> yp = A.apply(x);
    std::vector<double> ys = A.apply_serial(x);
    double maxDiff = 0.0;
    for (std::size_t i = 0; i < yp.size(); ++i)
        maxDiff = std::max(maxDiff, std::abs(yp[i] - ys[i]));

    double tPar = time_ms(reps, [&] { A.apply(x); });
    double tSer = time_ms(reps, [&] { A.apply_serial(x); });

    std::printf("spmv benchmark: n=%d per axis, %zu rows, %d reps\n",
                n, A.rows(), reps);
    std::printf("  parallel : %10.3f ms\n", tPar);
    std::printf("  serial   : %10.3f ms\n", tSer);
    std::printf("  speedup  : %10.2fx\n", tSer / tPar);
    std::printf("  max |parallel - serial| = %.3e\n", maxDiff);
    return maxDiff < 1e-12 ? 0 : 1;
}
