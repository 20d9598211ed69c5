#pragma once

#include <vector>

#include "qklab/grid.hpp"
#include "qklab/quasikahler.hpp"
#include "qklab/sparse.hpp"
#include "qklab/vectorfield.hpp"

namespace qklab {

/// Samples a symbolic scalar at every grid node.
std::vector<double> sample_on_grid(const Expr& e, const PeriodicGrid& grid);

/// Discrete directional derivative D_X: at each node,
///   (D_X u)(v) = sum_i X^i(v) * (u(v + e_i) - u(v)) / h
/// (staggered forward differences; exact on constants).
SparseMatrix assemble_vector_derivative(const PeriodicGrid& grid, const VectorField& X);

/// Sub-Laplacian L = sum_j D_{X_j}^T D_{X_j}; symmetric PSD with
/// constants in the kernel. Eigenvalues are those of the Rayleigh
/// quotient sum_j ||X_j u||^2 / ||u||^2 (cell volumes cancel).
SparseMatrix assemble_sub_laplacian(const PeriodicGrid& grid,
                                    const std::vector<VectorField>& fields);

/// Laplace-Beltrami operator of a metric field: the quadratic form
///   u^T A u = sum_cells sum_{ij} m_ij(c) d_i(u) d_j(u),
/// where d_i are forward differences to half-points and m(c) is the
/// inverse metric interpolated to the half-face by arithmetic mean of
/// its adjacent nodes (sqrt(det g) = 1 is a validated invariant of the
/// deformation, not recomputed here). Throws if any interpolated m(c)
/// fails to be positive definite.
SparseMatrix assemble_laplace_beltrami(const PeriodicGrid& grid, const MetricField& metric);

} // namespace qklab
