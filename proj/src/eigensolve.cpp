#include "qklab/eigensolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace qklab {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double c, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

void orthogonalize(std::vector<double>& w,
                   const std::vector<std::vector<double>>& defl,
                   const std::vector<std::vector<double>>& basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : defl) axpy(-dot(u, w), u, w);
        for (const auto& u : basis) axpy(-dot(u, w), u, w);
    }
}

} // namespace

SpectrumResult lowest_eigenpairs(const SparseMatrix& A, int k, const EigenOptions& opts) {
    std::size_t n = A.rows();
    if (A.rows() != A.cols()) throw std::invalid_argument("lowest_eigenpairs: not square");
    if (k < 1) throw std::invalid_argument("lowest_eigenpairs: k must be >= 1");
    if (k + 1 > static_cast<int>(n))
        throw std::invalid_argument("lowest_eigenpairs: k too large for operator size");

    double normEst = std::max(A.norm_estimate(), 1e-300);
    int maxBasis = std::min<std::size_t>(opts.max_basis, n - 1);

    SpectrumResult out;
    std::vector<std::vector<double>> defl;
    defl.push_back(std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n))));

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_start = [&]() {
        std::vector<double> v(n);
        for (double& x : v) x = gauss(rng);
        orthogonalize(v, defl, {});
        double nv = norm(v);
        if (nv == 0.0) throw std::runtime_error("lowest_eigenpairs: degenerate start vector");
        for (double& x : v) x /= nv;
        return v;
    };

    std::vector<double> v0 = random_start();
    int matvecsThisPair = 0;
    double bestRes = std::numeric_limits<double>::infinity();

    while (static_cast<int>(out.eigenvalues.size()) < k) {
        std::vector<std::vector<double>> V;
        std::vector<double> alpha, beta;
        std::vector<double> v = v0;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        bool restarted = false;

        for (int j = 0; j < maxBasis; ++j) {
            V.push_back(v);
            std::vector<double> w = A.apply(v);
            ++out.iterations;
            ++matvecsThisPair;
            double a = dot(v, w);
            alpha.push_back(a);
            axpy(-a, v, w);
            if (j > 0) axpy(-beta[j - 1], V[j - 1], w);
            orthogonalize(w, defl, V);
            double b = norm(w);

            bool invariant = b < 1e-13 * normEst;
            bool check = invariant || j < 32 || j % 8 == 0 || j == maxBasis - 1;
            if (check && j >= 0) {
                int m = j + 1;
                Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
                for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
                for (int i = 0; i + 1 < m; ++i) {
                    T(i, i + 1) = beta[i];
                    T(i + 1, i) = beta[i];
                }
                es.compute(T);
                const auto& theta = es.eigenvalues();
                const auto& S = es.eigenvectors();

                double res0 = invariant ? 0.0 : std::abs(b * S(m - 1, 0));
                bestRes = std::min(bestRes, res0 / normEst);
                if (invariant || res0 < opts.tol * normEst) {
                    // Harvest only the lowest converged Ritz pair: a Krylov
                    // space holds each multiple eigenvalue once, so the
                    // remaining copies must come from fresh restarts that
                    // are orthogonal to everything deflated so far.
                    for (int i = 0; i < m; ++i) {
                        double resi = invariant ? 0.0 : std::abs(b * S(m - 1, i));
                        if (resi >= opts.tol * normEst) break;
                        std::vector<double> y(n, 0.0);
                        for (int l = 0; l < m; ++l) axpy(S(l, i), V[l], y);
                        orthogonalize(y, defl, {});
                        double ny = norm(y);
                        if (ny < 1e-8) continue; // already captured by deflation
                        for (double& x : y) x /= ny;
                        std::vector<double> Ay = A.apply(y);
                        ++out.iterations;
                        double lam = dot(y, Ay);
                        axpy(-lam, y, Ay);
                        out.eigenvalues.push_back(lam);
                        out.residuals.push_back(norm(Ay) / normEst);
                        out.vectors.push_back(y);
                        defl.push_back(std::move(y));
                        matvecsThisPair = 0;
                        bestRes = std::numeric_limits<double>::infinity();
                        break;
                    }
                    v0 = random_start();
                    restarted = true;
                    break;
                }
                if (j == maxBasis - 1) {
                    // basis full: restart from the smallest Ritz vector
                    std::vector<double> y(n, 0.0);
                    for (int l = 0; l < m; ++l) axpy(S(l, 0), V[l], y);
                    orthogonalize(y, defl, {});
                    double ny = norm(y);
                    v0 = ny > 1e-8 ? y : random_start();
                    if (ny > 1e-8)
                        for (double& x : v0) x /= ny;
                    restarted = true;
                    break;
                }
            }
            if (invariant) {
                v0 = random_start();
                restarted = true;
                break;
            }
            beta.push_back(b);
            for (double& x : w) x /= b;
            v = std::move(w);
        }
        if (!restarted) v0 = random_start();

        if (matvecsThisPair > opts.max_iterations)
            throw std::runtime_error(
                "lowest_eigenpairs: no convergence within iteration cap; best residual "
                + std::to_string(bestRes));
    }

    // deflation order already yields ascending values; make it explicit
    std::vector<int> order(out.eigenvalues.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return out.eigenvalues[a] < out.eigenvalues[b]; });
    SpectrumResult sorted;
    sorted.iterations = out.iterations;
    for (int i : order) {
        sorted.eigenvalues.push_back(out.eigenvalues[i]);
        sorted.residuals.push_back(out.residuals[i]);
        sorted.vectors.push_back(std::move(out.vectors[i]));
    }
    sorted.multiplicity_of_first = 0;
    for (double l : sorted.eigenvalues)
        if (std::abs(l - sorted.eigenvalues[0]) < 1e-6) ++sorted.multiplicity_of_first;
    return sorted;
}

double rayleigh(const SparseMatrix& A, const std::vector<double>& u) {
    if (u.size() != A.rows()) throw std::invalid_argument("rayleigh: size mismatch");
    double mean = 0.0;
    for (double x : u) mean += x;
    mean /= static_cast<double>(u.size());
    std::vector<double> u0(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) u0[i] = u[i] - mean;
    double den = dot(u0, u0);
    double scale = dot(u, u);
    if (den <= 1e-28 * std::max(scale, 1.0))
        throw std::invalid_argument("rayleigh: constant input (zero after centering)");
    std::vector<double> Au = A.apply(u0);
    return dot(Au, u0) / den;
}

std::string SpectrumResult::to_json() const {
    nlohmann::json j;
    j["eigenvalues"] = eigenvalues;
    j["residuals"] = residuals;
    j["iterations"] = iterations;
    j["multiplicity_of_first"] = multiplicity_of_first;
    j["deflation"] = deflation;
    return j.dump(2);
}

} // namespace qklab
