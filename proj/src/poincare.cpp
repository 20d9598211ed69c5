#include "qklab/poincare.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qklab {

std::pair<double, double> admissible_p_range(int r, int n) {
    if (r < 1 || n < 1)
        throw std::invalid_argument("admissible_p_range: r and n must be positive");
    return {2.0 - 4.0 / (r * n + 2.0), 2.0};
}

double energy(const PeriodicGrid& grid, const std::vector<SparseMatrix>& derivs,
              const std::vector<double>& u, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("energy: p must exceed 1");
    double vol = grid.cell_volume();
    double total = 0.0;
    for (const SparseMatrix& D : derivs) {
        std::vector<double> du = D.apply(u);
        double s = 0.0;
        for (double x : du) s += std::pow(std::abs(x), p);
        total += std::pow(s * vol, 1.0 / p);
    }
    return total;
}

double energy(const PeriodicGrid& grid, const std::vector<VectorField>& fields,
              const std::vector<double>& u, double p) {
    std::vector<SparseMatrix> derivs;
    derivs.reserve(fields.size());
    for (const VectorField& X : fields)
        derivs.push_back(assemble_vector_derivative(grid, X));
    return energy(grid, derivs, u, p);
}

double sup_field_norm(const std::vector<VectorField>& fields, const PeriodicGrid& grid) {
    double K = 0.0;
    for (const VectorField& X : fields) {
        std::size_t count = grid.node_count();
        double fieldMax = 0.0;
#pragma omp parallel for schedule(static) reduction(max : fieldMax)
        for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(count); ++idx) {
            std::vector<double> v = X.eval(grid.point_of(static_cast<std::size_t>(idx)));
            double s = 0.0;
            for (double x : v) s += x * x;
            fieldMax = std::max(fieldMax, s);
        }
        K = std::max(K, fieldMax);
    }
    return K;
}

double centered_lq_norm(const PeriodicGrid& grid, const std::vector<double>& u, double q) {
    double mean = 0.0;
    for (double x : u) mean += x;
    mean /= static_cast<double>(u.size());
    double s = 0.0;
    for (double x : u) s += std::pow(std::abs(x - mean), q);
    return std::pow(s * grid.cell_volume(), 1.0 / q);
}

PoincareReport estimate_constant(const PeriodicGrid& grid,
                                 const std::vector<VectorField>& fields,
                                 double p, double q,
                                 const std::vector<std::vector<double>>& testFns,
                                 const EigenOptions& eig) {
    if (!(p > 1.0) || !(q > 1.0))
        throw std::invalid_argument("estimate_constant: p and q must exceed 1");

    PoincareReport rep;
    rep.p = p;
    rep.q = q;
    rep.test_count = static_cast<int>(testFns.size());
    rep.exact_constant = std::numeric_limits<double>::quiet_NaN();

    bool exact = p == 2.0 && q == 2.0;
    if (exact) {
        SparseMatrix A = assemble_sub_laplacian(grid, fields);
        SpectrumResult spec = lowest_eigenpairs(A, 1, eig);
        rep.exact_constant = 1.0 / std::sqrt(spec.lambda1());
    }

    std::vector<SparseMatrix> derivs;
    for (const VectorField& X : fields)
        derivs.push_back(assemble_vector_derivative(grid, X));

    for (const auto& u : testFns) {
        double nq = centered_lq_norm(grid, u, q);
        double e = energy(grid, derivs, u, p);
        PoincareReport::Row row{nq, e, 0.0, 0.0};
        if (e == 0.0 && nq > 1e-12) {
            ++rep.zero_energy_witnesses;
            ++rep.violations;
            row.ratio = std::numeric_limits<double>::infinity();
        } else if (e > 0.0) {
            row.ratio = nq / e;
            rep.empirical_constant = std::max(rep.empirical_constant, row.ratio);
            if (exact) {
                row.slack = rep.exact_constant * e - nq;
                if (nq > rep.exact_constant * e * (1.0 + 1e-8)) ++rep.violations;
            }
        }
        rep.rows.push_back(row);
    }
    return rep;
}

double lambda1_lower_bound(double Cp, int fieldCount, double K, double invPhiNorm) {
    if (Cp <= 0 || fieldCount <= 0 || K <= 0 || invPhiNorm <= 0)
        throw std::invalid_argument("lambda1_lower_bound: all inputs must be positive");
    double cn = Cp * fieldCount;
    return 1.0 / (cn * cn * K * invPhiNorm);
}

ChainReport verify_estimate_chain(const PeriodicGrid& grid,
                                  const std::vector<SparseMatrix>& derivs,
                                  const SparseMatrix& laplaceBeltrami,
                                  const std::vector<double>& phiField,
                                  const std::vector<double>& u, double p, double K) {
    if (!(p > 1.0 && p < 2.0))
        throw std::invalid_argument("verify_estimate_chain: p must lie in (1,2)");
    ChainReport rep;
    rep.lhs = energy(grid, derivs, u, p);

    std::vector<double> Au = laplaceBeltrami.apply(u);
    double quad = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) quad += u[i] * Au[i];
    quad = std::max(quad, 0.0) * grid.cell_volume(); // int ||grad_phi u||_phi^2 dvol

    double invPhi = inv_phi_norm(phiField, p, grid);
    rep.rhs = static_cast<double>(derivs.size()) * std::sqrt(K) * std::sqrt(quad)
              * std::sqrt(invPhi);
    rep.slack = rep.rhs - rep.lhs;
    rep.ok = rep.slack >= -1e-8 * rep.rhs;
    return rep;
}

ChainReport verify_estimate_chain(const PeriodicGrid& grid,
                                  const std::vector<VectorField>& fields,
                                  const MetricField& metric,
                                  const std::vector<double>& phiField,
                                  const std::vector<double>& u, double p) {
    std::vector<SparseMatrix> derivs;
    for (const VectorField& X : fields)
        derivs.push_back(assemble_vector_derivative(grid, X));
    SparseMatrix A = assemble_laplace_beltrami(grid, metric);
    double K = sup_field_norm(fields, grid);
    return verify_estimate_chain(grid, derivs, A, phiField, u, p, K);
}

std::vector<double> random_band_limited(const PeriodicGrid& grid, int maxFreq,
                                        std::mt19937_64& rng, int modes) {
    int n = grid.dimension();
    std::uniform_int_distribution<int> freq(-maxFreq, maxFreq);
    std::normal_distribution<double> amp(0.0, 1.0);

    struct Mode {
        std::vector<int> k;
        double a, b;
    };
    std::vector<Mode> ms;
    for (int m = 0; m < modes; ++m) {
        Mode mode;
        mode.k.resize(n);
        bool zero = true;
        for (int i = 0; i < n; ++i) {
            mode.k[i] = freq(rng);
            if (mode.k[i] != 0) zero = false;
        }
        mode.a = amp(rng);
        mode.b = amp(rng);
        if (zero) { --m; continue; }
        ms.push_back(std::move(mode));
    }

    std::vector<double> u(grid.node_count(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(u.size()); ++idx) {
        std::vector<double> pt = grid.point_of(static_cast<std::size_t>(idx));
        double s = 0.0;
        for (const Mode& mode : ms) {
            double phase = 0.0;
            for (int i = 0; i < n; ++i) phase += mode.k[i] * pt[i];
            s += mode.a * std::cos(phase) + mode.b * std::sin(phase);
        }
        u[idx] = s;
    }
    return u;
}

} // namespace qklab
