#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qklab/sparse.hpp"

namespace qklab {

struct EigenOptions {
    double tol = 1e-8;          // relative residual threshold
    int max_iterations = 5000;  // matvec cap per eigenpair
    int max_basis = 300;        // Krylov basis size before restart
    std::uint64_t seed = 1;     // starting-vector seed
};

/// Lowest eigenvalues of a symmetric PSD operator, orthogonal to the
/// deflated constant vector.
struct SpectrumResult {
    std::vector<double> eigenvalues;            // ascending
    std::vector<std::vector<double>> vectors;   // matching eigenvectors
    std::vector<double> residuals;              // ||Av - lv|| / ||A||_est
    int iterations = 0;                         // total matvecs
    int multiplicity_of_first = 0;              // values within 1e-6 of the first
    std::string deflation = "constants";

    double lambda1() const { return eigenvalues.at(0); }
    std::string to_json() const;
};

/// Lanczos with full reorthogonalization against the constant vector,
/// the growing Krylov basis, and previously converged eigenvectors.
/// Multiplicities are resolved by deflate-and-restart. Throws on
/// non-convergence within the iteration cap (message carries the best
/// residual reached).
SpectrumResult lowest_eigenpairs(const SparseMatrix& A, int k,
                                 const EigenOptions& opts = {});

/// Rayleigh quotient <A u0, u0>/<u0, u0> with u0 = u - mean(u).
/// Throws if u is constant (zero denominator after centering).
double rayleigh(const SparseMatrix& A, const std::vector<double>& u);

} // namespace qklab
