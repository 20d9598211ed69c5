// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qklab/assemble.hpp"
#include "qklab/construction.hpp"
#include "qklab/eigensolve.hpp"
#include "qklab/experiment.hpp"
#include "qklab/hormander.hpp"
#include "qklab/poincare.hpp"
#include "qklab/quasikahler.hpp"

using namespace qklab;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

Eigen::MatrixXd dense(const SparseMatrix& A) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.rows(), A.cols());
    for (std::size_t r = 0; r < A.rows(); ++r)
        for (std::size_t k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k)
            M(r, A.col_idx()[k]) += A.values()[k];
    return M;
}

SparseMatrix deformed_operator(const ConstructionSpec& spec, const PeriodicGrid& grid,
                               double phiMax, double delta) {
    auto [V, W] = build_construction(spec);
    BaseStructure base = base_structure(spec.ambient_dim);
    SingularReport sing = find_singular_set(spec, grid, 1e-8);
    double mid = 0.5 * grid.spacing();
    std::vector<double> phi = build_bump(sing, delta, phiMax, grid, mid);
    return assemble_laplace_beltrami(grid, build_metric_field(grid, V, W, phi, base, 1e-8, mid));
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void criterion1_flat_baseline() {
    auto t0 = Clock::now();
    ConstructionSpec spec = preset_t4_d1();
    PeriodicGrid grid(4, 16);
    SparseMatrix A = deformed_operator(spec, grid, 1.0, M_PI / 8.0);

    double h = grid.spacing();
    double want = (2.0 - 2.0 * std::cos(h)) / (h * h);
    SpectrumResult res = lowest_eigenpairs(A, 9);
    double elapsed = seconds_since(t0);

    bool ok = std::abs(res.lambda1() - want) < 1e-9
              && res.multiplicity_of_first == 8
              && elapsed < 60.0;
    report(1, "flat baseline lambda1 and multiplicity at N=16", ok,
           "lambda1=" + fmt(res.lambda1()) + " want=" + fmt(want)
               + " mult=" + std::to_string(res.multiplicity_of_first)
               + " t=" + fmt(elapsed) + "s");
}

void criterion2_dense_oracle() {
    PeriodicGrid grid(4, 4);
    bool ok = true;
    std::string detail;
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ConstructionSpec spec = preset_by_name(name);
        auto [V, W] = build_construction(spec);
        std::vector<std::pair<std::string, SparseMatrix>> ops;
        ops.emplace_back("subLap", assemble_sub_laplacian(grid, {V, W}));
        ops.emplace_back("metric", deformed_operator(spec, grid, 4.0, M_PI / 8.0));
        for (auto& [label, A] : ops) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(A));
            SpectrumResult res = lowest_eigenpairs(A, 5);
            for (int i = 0; i < 5; ++i) {
                double err = std::abs(res.eigenvalues[i] - es.eigenvalues()(i + 1));
                if (err > 1e-8 * std::max(1.0, es.eigenvalues()(i + 1))) {
                    ok = false;
                    detail = std::string(name) + "/" + label + " ev" + std::to_string(i)
                             + " err=" + fmt(err);
                }
            }
        }
    }
    report(2, "Lanczos matches dense eigendecomposition at N=4", ok, detail);
}

// shared sweep state reused by criteria 3, 4, and 9
struct SweepRun {
    std::string preset;
    ExperimentSummary summary;
};

std::vector<SweepRun> run_sweeps() {
    std::vector<SweepRun> out;
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ExperimentConfig cfg;
        cfg.preset = name;
        cfg.grid_n = 16;
        cfg.phi_max = {1.0, 2.0, 4.0, 8.0};
        cfg.delta = M_PI / 8.0;
        cfg.p = 1.8;
        cfg.test_functions = 100;
        out.push_back({name, run_sweep(cfg, std::string("acceptance-out/") + name)});
    }
    return out;
}

void criterion3_volume(const std::vector<SweepRun>& sweeps) {
    bool ok = true;
    double worst = 0.0;
    for (const SweepRun& s : sweeps) {
        worst = std::max(worst, s.summary.max_det_defect);
        if (s.summary.max_det_defect >= 1e-10) ok = false;
    }
    report(3, "volume invariance |det g - 1| < 1e-10 across sweeps", ok,
           "max defect=" + fmt(worst));
}

void criterion4_flexibility(const std::vector<SweepRun>& sweeps, double elapsed) {
    bool ok = elapsed < 300.0;
    std::string detail = "t=" + fmt(elapsed) + "s";
    for (const SweepRun& s : sweeps) {
        const auto& rows = s.summary.rows;
        for (size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i].lambda1 > rows[i - 1].lambda1)) ok = false;
        if (!(rows.back().lambda1 >= 2.0 * rows.front().lambda1)) ok = false;
        detail += " " + s.preset + ": " + fmt(rows.front().lambda1) + " -> "
                  + fmt(rows.back().lambda1);
    }
    report(4, "lambda1 strictly increasing, doubled at phi_max=8", ok, detail);
}

void criterion5_hormander() {
    bool ok = true;
    std::string detail;
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ConstructionSpec spec = preset_by_name(name);
        auto [V, W] = build_construction(spec);
        SingularReport sing = find_singular_set(spec, PeriodicGrid(4, 16), 1e-8);

        std::vector<VectorField> fields;
        int maxLen = 0;
        for (const auto& b : generate_brackets({V, W}, 6)) {
            fields.push_back(b.field);
            maxLen = std::max(maxLen, b.word.length());
        }
        auto pts = hormander_samples(PeriodicGrid(4, 4), 2000, sing.x_roots);
        RankReport rep = rank_report(fields, pts, 1e-6, 6);
        if (rep.min_rank != 4 || maxLen > 6 || rep.points_sampled < 2000) ok = false;
        detail += std::string(name) + ": rank " + std::to_string(rep.min_rank) + "/4 at "
                  + std::to_string(rep.points_sampled) + " pts; ";
    }
    report(5, "bracket words of length <= 6 reach rank 4 everywhere", ok, detail);
}

void criterion6_symbolic_oracles() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    auto random_point = [&](int n) {
        std::vector<double> p(n);
        for (double& x : p) x = uni(rng);
        return p;
    };

    bool ok = true;
    std::string detail;

    // closed form of the iterated adjoint vs actual brackets, alpha <= 4
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ConstructionSpec spec = preset_by_name(name);
        auto [V, W] = build_construction(spec);
        for (int alpha = 0; alpha <= 4 && ok; ++alpha) {
            VectorField a = iterated_adjoint(V, W, alpha);
            VectorField b = step1_closed_form(spec, alpha);
            for (int t = 0; t < 1000; ++t) {
                std::vector<double> p = random_point(4);
                std::vector<double> va = a.eval(p), vb = b.eval(p);
                for (int i = 0; i < 4; ++i)
                    if (std::abs(va[i] - vb[i]) > 1e-9) {
                        ok = false;
                        detail = "adjoint closed form diverges";
                    }
            }
        }
    }

    // oscillator identity: Q'(d/dx) phi_l = 2 b_j phi_l', d <= 3
    for (int d = 1; d <= 3 && ok; ++d) {
        std::vector<Expr> phi = phi_basis(d);
        std::vector<std::int64_t> b = lemma_b_coefficients(d);
        std::vector<std::int64_t> q = q_coefficients(d);
        for (int l = 0; l < 2 * d; ++l) {
            Expr lhs;
            for (size_t k = 2; k < q.size(); k += 2) {
                Expr der = phi[l];
                for (size_t s = 0; s + 1 < k; ++s) der = der.diff(0);
                lhs = lhs + Expr::constant(static_cast<std::int64_t>(k) * q[k]) * der;
            }
            Expr rhs = Expr::constant(2 * b[l / 2]) * phi[l].diff(0);
            for (int t = 0; t < 1000; ++t) {
                std::vector<double> p = {uni(rng)};
                if (std::abs(lhs.eval(p) - rhs.eval(p)) > 1e-9) {
                    ok = false;
                    detail = "oscillator identity fails d=" + std::to_string(d);
                }
            }
        }
    }

    // xi_r dual construction, r <= 2d (throws internally on disagreement
    // beyond 1e-9 at its own 1000 sample points)
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ConstructionSpec spec = preset_by_name(name);
        for (int r = 1; r <= 2 * spec.d; ++r) {
            try {
                xi_field(spec, r, 1e-9);
            } catch (const std::exception& e) {
                ok = false;
                detail = e.what();
            }
        }
    }
    report(6, "symbolic oracles agree at 1000 random points to 1e-9", ok, detail);
}

void criterion7_singular_set() {
    PeriodicGrid grid(4, 16);
    SingularReport d2 = find_singular_set(preset_t4_d2_singular(), grid, 1e-8);
    SingularReport d1 = find_singular_set(preset_t4_d1(), grid, 1e-8);

    bool ok = !d2.empty && d2.x_roots.size() == 1
              && std::abs(d2.x_roots[0] - M_PI) < 1e-8
              && d2.grid_fraction == 1.0 / 16.0
              && d1.empty && d1.grid_fraction == 0.0;
    report(7, "singular set: plane x=pi (d=2), empty (d=1), fraction 1/N", ok,
           "root=" + (d2.x_roots.empty() ? std::string("none") : fmt(d2.x_roots[0]))
               + " fraction=" + fmt(d2.grid_fraction));
}

void criterion8_poincare() {
    ConstructionSpec spec = preset_t4_d1();
    auto [V, W] = build_construction(spec);
    PeriodicGrid grid(4, 16);

    std::mt19937_64 rng(2718281828);
    std::vector<std::vector<double>> fns;
    for (int t = 0; t < 100; ++t) fns.push_back(random_band_limited(grid, 4, rng));

    PoincareReport rep = estimate_constant(grid, {V, W}, 2.0, 2.0, fns);
    bool ok = std::isfinite(rep.exact_constant) && rep.exact_constant > 0.0
              && rep.violations == 0 && rep.zero_energy_witnesses == 0
              && rep.empirical_constant <= rep.exact_constant * (1.0 + 1e-8);
    report(8, "p=q=2 Poincare constant, 100 test functions, no violations", ok,
           "exact=" + fmt(rep.exact_constant) + " empirical=" + fmt(rep.empirical_constant));
}

void criterion9_chain(const std::vector<SweepRun>& sweeps) {
    auto [lo, hi] = admissible_p_range(3, 4);
    bool ok = lo < 1.8 && 1.8 < hi;
    int violations = 0;
    for (const SweepRun& s : sweeps)
        for (const SweepRow& r : s.summary.rows) {
            violations += r.chain_violations;
            if (r.chain_violations != 0 || r.chain_min_slack < -1e-8) ok = false;
        }
    report(9, "Hoelder chain inequality at p=1.8, 100 functions per point", ok,
           "violations=" + std::to_string(violations) + " p-range=(" + fmt(lo) + ",2)");
}

void criterion10_isotropy() {
    BaseStructure base = base_structure(4);
    std::mt19937_64 rng(161803);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    std::vector<std::vector<double>> pts(10000, std::vector<double>(4));
    for (auto& p : pts)
        for (double& x : p) x = uni(rng);

    bool ok = true;
    double worst = 0.0;
    for (const char* name : {"t4-d1", "t4-d2-singular"}) {
        ConstructionSpec spec = preset_by_name(name);
        auto [V, W] = build_construction(spec);
        double m = isotropy_check(V, W, base, pts);
        worst = std::max(worst, m);
        if (m >= 1e-14) ok = false;
    }
    report(10, "omega vanishes on span(V,W) over 10^4 samples", ok, "max=" + fmt(worst));
}

} // namespace

int main() {
    auto t0 = Clock::now();
    criterion1_flat_baseline();
    criterion2_dense_oracle();

    auto tSweep = Clock::now();
    std::vector<SweepRun> sweeps = run_sweeps();
    double sweepTime = seconds_since(tSweep);
    criterion3_volume(sweeps);
    criterion4_flexibility(sweeps, sweepTime);

    criterion5_hormander();
    criterion6_symbolic_oracles();
    criterion7_singular_set();
    criterion8_poincare();
    criterion9_chain(sweeps);
    criterion10_isotropy();

    std::printf("%d/10 criteria passed in %.1f s\n", 10 - failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
