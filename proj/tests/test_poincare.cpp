#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qklab/construction.hpp"
#include "qklab/poincare.hpp"

using namespace qklab;

TEST_CASE("admissible exponent range") {
    auto [lo, hi] = admissible_p_range(3, 4);
    CHECK(lo == doctest::Approx(12.0 / 7.0).epsilon(1e-15));
    CHECK(hi == 2.0);
    auto [lo2, hi2] = admissible_p_range(1, 2);
    CHECK(lo2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hi2 == 2.0);
    CHECK(lo < 1.8);
    CHECK_THROWS(admissible_p_range(0, 4));
}

TEST_CASE("energy of a pure mode under a coordinate frame") {
    // u = sin(x) on T^2, fields {d/dx, d/dy}: forward differences give
    // |D_x u| = |(sin(x+h) - sin(x))/h|, and D_y u = 0
    PeriodicGrid grid(2, 16);
    double h = grid.spacing();
    std::vector<VectorField> frame = {coordinate_field(2, 0), coordinate_field(2, 1)};
    std::vector<double> u(grid.node_count());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = std::sin(grid.point_of(i)[0]);

    double p = 2.0 - 1e-9; // energy allows any p > 1; probe near L^2
    double sum = 0.0;
    for (int i = 0; i < 16; ++i) {
        double d = (std::sin((i + 1) * h) - std::sin(i * h)) / h;
        sum += std::pow(std::abs(d), p) * h * h * 16.0; // 16 y-nodes per x
    }
    CHECK(energy(grid, frame, u, p) == doctest::Approx(std::pow(sum, 1.0 / p)).epsilon(1e-10));
}

TEST_CASE("energy is absolutely homogeneous and vanishes on constants") {
    PeriodicGrid grid(2, 8);
    std::vector<VectorField> frame = {coordinate_field(2, 0), coordinate_field(2, 1)};
    std::vector<double> u(grid.node_count());
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& x : u) x = gauss(rng);

    double e = energy(grid, frame, u, 1.8);
    std::vector<double> u3(u);
    for (double& x : u3) x *= -3.0;
    CHECK(energy(grid, frame, u3, 1.8) == doctest::Approx(3.0 * e).epsilon(1e-12));
    CHECK(energy(grid, frame, std::vector<double>(u.size(), 2.5), 1.8) == 0.0);
}

TEST_CASE("sup_field_norm of the presets is 5") {
    // |V|^2 = 1 + h(z)^2 peaks at h = 2; |W|^2 stays <= 4 for both presets
    PeriodicGrid grid(4, 16);
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ConstructionSpec spec = preset_by_name(name);
        auto [V, W] = build_construction(spec);
        CHECK(sup_field_norm({V, W}, grid) == doctest::Approx(5.0).epsilon(1e-12));
    }
    CHECK(sup_field_norm({coordinate_field(2, 0)}, PeriodicGrid(2, 8)) == 1.0);
}

TEST_CASE("centered norm ignores the mean") {
    PeriodicGrid grid(1, 8);
    std::vector<double> u = {3, 3, 3, 3, 3, 3, 3, 3};
    CHECK(centered_lq_norm(grid, u, 2.0) == 0.0);
    std::vector<double> v = {1, -1, 1, -1, 1, -1, 1, -1};
    // mean zero: ||v||_2 = (8 h)^{1/2}
    CHECK(centered_lq_norm(grid, v, 2.0)
          == doctest::Approx(std::sqrt(8.0 * grid.spacing())).epsilon(1e-14));
}

TEST_CASE("p=q=2: the exact constant is attained and never violated") {
    PeriodicGrid grid(2, 16);
    std::vector<VectorField> frame = {coordinate_field(2, 0), coordinate_field(2, 1)};

    std::mt19937_64 rng(1);
    std::vector<std::vector<double>> fns;
    for (int t = 0; t < 100; ++t) fns.push_back(random_band_limited(grid, 4, rng));

    PoincareReport rep = estimate_constant(grid, frame, 2.0, 2.0, fns);
    double h = grid.spacing();
    double lam = (2.0 - 2.0 * std::cos(h)) / (h * h);
    CHECK(rep.exact_constant == doctest::Approx(1.0 / std::sqrt(lam)).epsilon(1e-8));
    CHECK(rep.violations == 0);
    CHECK(rep.zero_energy_witnesses == 0);
    CHECK(rep.empirical_constant <= rep.exact_constant * (1.0 + 1e-8));

    // equality case: the single-axis first eigenvector sin(x) has zero
    // energy in the transverse field, so the inequality saturates
    std::vector<double> mode(grid.node_count());
    for (std::size_t i = 0; i < mode.size(); ++i)
        mode[i] = std::sin(grid.point_of(i)[0]);
    PoincareReport eq = estimate_constant(grid, frame, 2.0, 2.0, {mode});
    CHECK(eq.empirical_constant == doctest::Approx(eq.exact_constant).epsilon(1e-8));
}

TEST_CASE("lower bound formula arithmetic") {
    CHECK(lambda1_lower_bound(1.0, 2, 5.0, 0.1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(lambda1_lower_bound(2.0, 1, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
    // bound improves as the weighted norm of 1/phi shrinks
    CHECK(lambda1_lower_bound(1.0, 2, 5.0, 0.05) > lambda1_lower_bound(1.0, 2, 5.0, 0.1));
    CHECK_THROWS(lambda1_lower_bound(0.0, 2, 5.0, 0.1));
    CHECK_THROWS(lambda1_lower_bound(1.0, 2, -1.0, 0.1));
}

TEST_CASE("estimate chain holds on the deformed metric") {
    ConstructionSpec spec = preset_t4_d2_singular();
    auto [V, W] = build_construction(spec);
    PeriodicGrid grid(4, 8);
    BaseStructure base = base_structure(4);
    SingularReport sing = find_singular_set(spec, grid, 1e-8);
    std::vector<double> phi = build_bump(sing, M_PI / 8.0, 4.0, grid);
    MetricField mf = build_metric_field(grid, V, W, phi, base);

    std::mt19937_64 rng(6);
    for (int t = 0; t < 25; ++t) {
        std::vector<double> u = random_band_limited(grid, 2, rng);
        ChainReport rep = verify_estimate_chain(grid, {V, W}, mf, phi, u, 1.8);
        CHECK(rep.ok);
        CHECK(rep.lhs <= rep.rhs + 1e-8 * rep.rhs);
    }
}

TEST_CASE("chain inequality tightens to equality scaling on the flat torus") {
    // sanity on the pieces: lhs and rhs both scale linearly in u
    ConstructionSpec spec = preset_t4_d1();
    auto [V, W] = build_construction(spec);
    PeriodicGrid grid(4, 4);
    BaseStructure base = base_structure(4);
    std::vector<double> phi(grid.node_count(), 2.0);
    MetricField mf = build_metric_field(grid, V, W, phi, base);

    std::mt19937_64 rng(9);
    std::vector<double> u = random_band_limited(grid, 1, rng);
    ChainReport one = verify_estimate_chain(grid, {V, W}, mf, phi, u, 1.8);
    for (double& x : u) x *= 4.0;
    ChainReport four = verify_estimate_chain(grid, {V, W}, mf, phi, u, 1.8);
    CHECK(four.lhs == doctest::Approx(4.0 * one.lhs).epsilon(1e-10));
    CHECK(four.rhs == doctest::Approx(4.0 * one.rhs).epsilon(1e-10));
}

TEST_CASE("band-limited samples are reproducible and mean-small") {
    PeriodicGrid grid(2, 16);
    std::mt19937_64 a(123), b(123);
    std::vector<double> u = random_band_limited(grid, 3, a);
    std::vector<double> v = random_band_limited(grid, 3, b);
    CHECK(u == v);
    double mean = 0.0;
    for (double x : u) mean += x;
    mean /= static_cast<double>(u.size());
    CHECK(std::abs(mean) < 1e-10); // no constant mode by construction
}
