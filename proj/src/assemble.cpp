#include "qklab/assemble.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace qklab {

std::vector<double> sample_on_grid(const Expr& e, const PeriodicGrid& grid) {
    std::vector<double> out(grid.node_count());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(out.size()); ++idx)
        out[idx] = e.eval(grid.point_of(static_cast<std::size_t>(idx)));
    return out;
}

SparseMatrix assemble_vector_derivative(const PeriodicGrid& grid, const VectorField& X) {
    if (X.dimension() != grid.dimension())
        throw std::invalid_argument("assemble_vector_derivative: dimension mismatch");
    int n = grid.dimension();
    std::size_t count = grid.node_count();
    double invH = 1.0 / grid.spacing();

    // coefficient values per axis, evaluated in parallel
    std::vector<std::vector<double>> coeff(n);
    for (int i = 0; i < n; ++i)
        coeff[i] = sample_on_grid(X.coefficient(i), grid);

    std::vector<Triplet> ts;
    ts.reserve(count * (n + 1));
    for (std::size_t v = 0; v < count; ++v) {
        double diag = 0.0;
        for (int i = 0; i < n; ++i) {
            double c = coeff[i][v];
            if (c == 0.0) continue;
            ts.push_back({v, grid.neighbor(v, i, +1), c * invH});
            diag -= c * invH;
        }
        if (diag != 0.0) ts.push_back({v, v, diag});
    }
    return SparseMatrix::from_triplets(count, count, std::move(ts));
}

SparseMatrix assemble_sub_laplacian(const PeriodicGrid& grid,
                                    const std::vector<VectorField>& fields) {
    if (fields.empty())
        throw std::invalid_argument("assemble_sub_laplacian: no fields");
    std::size_t count = grid.node_count();
    std::vector<Triplet> ts;
    for (const VectorField& X : fields) {
        SparseMatrix D = assemble_vector_derivative(grid, X);
        SparseMatrix G = D.gram();
        for (std::size_t r = 0; r < count; ++r)
            for (std::size_t k = G.row_ptr()[r]; k < G.row_ptr()[r + 1]; ++k)
                ts.push_back({r, G.col_idx()[k], G.values()[k]});
    }
    return SparseMatrix::from_triplets(count, count, std::move(ts));
}

SparseMatrix assemble_laplace_beltrami(const PeriodicGrid& grid, const MetricField& metric) {
    int n = grid.dimension();
    std::size_t count = grid.node_count();
    if (metric.g.size() != count)
        throw std::invalid_argument("assemble_laplace_beltrami: metric node count mismatch");
    double invH2 = 1.0 / (grid.spacing() * grid.spacing());

    std::vector<Triplet> ts;
    ts.reserve(count * n * n * 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (std::size_t c = 0; c < count; ++c) {
        std::vector<std::size_t> nb(n);
        for (int i = 0; i < n; ++i) nb[i] = grid.neighbor(c, i, +1);

        // One inverse-metric matrix per cell, sampled at the cell center
        // (see build_metric_field's offset). Entrywise interpolation of
        // node values can leave the positive cone near sharp bumps; a
        // directly sampled metric cannot.
        const Eigen::MatrixXd& m = metric.ginv[c];
        es.compute(m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) <= 1e-12 * std::max(1.0, es.eigenvalues()(n - 1)))
            throw std::runtime_error("assemble_laplace_beltrami: cell metric not SPD at cell "
                                     + std::to_string(c));

        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double w = m(i, j) * invH2;
                if (w == 0.0) continue;
                ts.push_back({nb[i], nb[j], w});
                ts.push_back({nb[i], c, -w});
                ts.push_back({c, nb[j], -w});
                ts.push_back({c, c, w});
            }
        }
    }
    return SparseMatrix::from_triplets(count, count, std::move(ts));
}

} // namespace qklab
