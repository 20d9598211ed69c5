#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qklab/construction.hpp"

using namespace qklab;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    std::vector<double> p(n);
    for (double& x : p) x = uni(rng);
    return p;
}

double max_field_diff(const VectorField& A, const VectorField& B,
                      std::mt19937_64& rng, int samples) {
    double m = 0.0;
    for (int t = 0; t < samples; ++t) {
        std::vector<double> p = random_point(rng, A.dimension());
        std::vector<double> a = A.eval(p), b = B.eval(p);
        for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

} // namespace

TEST_CASE("presets validate and have the documented shape") {
    ConstructionSpec d1 = preset_t4_d1();
    CHECK(d1.d == 1);
    CHECK(d1.ambient_dim == 4);
    CHECK(d1.Z.size() == 2);
    CHECK_NOTHROW(d1.validate());

    ConstructionSpec d2 = preset_t4_d2_singular();
    CHECK(d2.d == 2);
    CHECK(d2.Z.size() == 4);
    CHECK(d2.Z[2] == d2.Z[0]);
    CHECK(d2.Z[3] == d2.Z[1]);
    CHECK_NOTHROW(d2.validate());

    CHECK_THROWS(preset_by_name("no-such-preset"));
}

TEST_CASE("oscillator basis phi_{2j-1} = sin(jx), phi_{2j} = cos(jx)") {
    std::vector<Expr> phi = phi_basis(2);
    REQUIRE(phi.size() == 4);
    CHECK(phi[0] == Expr::sin(1, 0));
    CHECK(phi[1] == Expr::cos(1, 0));
    CHECK(phi[2] == Expr::sin(2, 0));
    CHECK(phi[3] == Expr::cos(2, 0));
}

TEST_CASE("built fields match their definition at sample points") {
    ConstructionSpec spec = preset_t4_d1();
    auto [V, W] = build_construction(spec);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> p = random_point(rng, 4);
        std::vector<double> v = V.eval(p), w = W.eval(p);
        CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(v[1] == doctest::Approx(std::cos(p[2]) + std::cos(p[3])).epsilon(1e-13));
        CHECK(v[2] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(w[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(w[2] == doctest::Approx(std::sin(p[0])).epsilon(1e-13));
        CHECK(w[3] == doctest::Approx(std::cos(p[0])).epsilon(1e-13));
    }
}

TEST_CASE("iterated adjoint agrees with the closed form for alpha <= 4") {
    std::mt19937_64 rng(3);
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ConstructionSpec spec = preset_by_name(name);
        auto [V, W] = build_construction(spec);
        for (int alpha = 0; alpha <= 4; ++alpha) {
            VectorField brackets = iterated_adjoint(V, W, alpha);
            VectorField closed = step1_closed_form(spec, alpha);
            CHECK(max_field_diff(brackets, closed, rng, 200) < 1e-9);
        }
    }
}

TEST_CASE("b coefficients b_j = prod_{k != j} (k^2 - j^2)") {
    CHECK(lemma_b_coefficients(1) == std::vector<std::int64_t>{1});
    CHECK(lemma_b_coefficients(2) == std::vector<std::int64_t>{3, -3});
    // d = 3: b_1 = (4-1)(9-1) = 24, b_2 = (1-4)(9-4) = -15, b_3 = (1-9)(4-9) = 40
    CHECK(lemma_b_coefficients(3) == std::vector<std::int64_t>{24, -15, 40});
}

TEST_CASE("Q coefficients expand prod (t^2 + j^2)") {
    // d=1: t^2 + 1
    CHECK(q_coefficients(1) == std::vector<std::int64_t>{1, 0, 1});
    // d=2: (t^2+1)(t^2+4) = t^4 + 5 t^2 + 4
    CHECK(q_coefficients(2) == std::vector<std::int64_t>{4, 0, 5, 0, 1});
    // d=3: (t^4+5t^2+4)(t^2+9) = t^6 + 14 t^4 + 49 t^2 + 36
    CHECK(q_coefficients(3) == std::vector<std::int64_t>{36, 0, 49, 0, 14, 0, 1});
}

TEST_CASE("basis identity: applying Q' to phi_l gives 2 b phi_l'") {
    // Q'(t) acts on the oscillator basis with t = d/dx acting through
    // the recurrence phi'' = -j^2 phi, so Q'(d/dx) phi_l = 2 b_j phi_l'
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    for (int d = 1; d <= 3; ++d) {
        std::vector<Expr> phi = phi_basis(d);
        std::vector<std::int64_t> b = lemma_b_coefficients(d);
        std::vector<std::int64_t> q = q_coefficients(d);
        for (int l = 0; l < 2 * d; ++l) {
            int j = l / 2 + 1;
            // Q'(t) = sum over even k of k q_k t^{k-1}
            Expr lhs;
            for (size_t k = 2; k < q.size(); k += 2) {
                Expr der = phi[l];
                for (size_t s = 0; s + 1 < k; ++s) der = der.diff(0);
                lhs = lhs + Expr::constant(static_cast<std::int64_t>(k) * q[k]) * der;
            }
            Expr rhs = Expr::constant(2 * b[j - 1]) * phi[l].diff(0);
            for (int t = 0; t < 1000; ++t) {
                std::vector<double> p = {uni(rng)};
                CHECK(std::abs(lhs.eval(p) - rhs.eval(p)) < 1e-9);
            }
        }
    }
}

TEST_CASE("xi_r matches its closed form and isolates the d/dy direction") {
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ConstructionSpec spec = preset_by_name(name);
        for (int r = 1; r <= 2 * spec.d; ++r) {
            // xi_field cross-checks the bracket route against the closed
            // form internally and throws on disagreement
            REQUIRE_NOTHROW(xi_field(spec, r, 1e-9));
            VectorField xi = xi_field(spec, r, 1e-9);
            CHECK(xi.coefficient(0).is_zero());
            for (int i = 2; i < spec.ambient_dim; ++i)
                CHECK(xi.coefficient(i).is_zero());
            CHECK_FALSE(xi.coefficient(1).is_zero());
        }
    }
}

TEST_CASE("xi_1 closed form for the d=1 preset") {
    // d=1: xi_1 = -2 (sin'(x) Z_1 h + cos'(x) Z_2 h) d/dy
    //     = -2 (cos x (-sin z1) - sin x (-sin z2)) d/dy
    ConstructionSpec spec = preset_t4_d1();
    VectorField xi = xi_field(spec, 1);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> p = random_point(rng, 4);
        double want = -2.0 * (std::cos(p[0]) * -std::sin(p[2])
                              - std::sin(p[0]) * -std::sin(p[3]));
        CHECK(xi.eval(p)[1] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("oscillator Wronskian never degenerates") {
    for (int d = 1; d <= 3; ++d)
        CHECK(wronskian_min_abs_det(d, 512) > 1e-6);
}

TEST_CASE("validation rejects malformed specs") {
    ConstructionSpec bad = preset_t4_d1();
    bad.Z.pop_back(); // wrong count
    CHECK_THROWS(bad.validate());

    ConstructionSpec bad2 = preset_t4_d1();
    bad2.Z[1] = bad2.Z[0]; // Z no longer spans TM for d=1
    CHECK_THROWS(bad2.validate());
}
