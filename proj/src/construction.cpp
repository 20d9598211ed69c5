#include "qklab/construction.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace qklab {

void ConstructionSpec::validate() const {
    if (d < 1) throw std::invalid_argument("ConstructionSpec: d must be >= 1");
    if (ambient_dim < 4 || ambient_dim % 2 != 0)
        throw std::invalid_argument("ConstructionSpec: ambient dimension must be even and >= 4");
    if (static_cast<int>(Z.size()) != 2 * d)
        throw std::invalid_argument("ConstructionSpec: expected exactly 2d Z-fields");
    if (h.max_coord() >= ambient_dim || h.max_coord() < 2)
        if (!h.is_constant())
            throw std::invalid_argument("ConstructionSpec: h must depend on z coordinates only");
    for (const VectorField& z : Z) {
        if (z.dimension() != ambient_dim)
            throw std::invalid_argument("ConstructionSpec: Z-field dimension mismatch");
        if (!z.coefficient(0).is_zero() || !z.coefficient(1).is_zero())
            throw std::invalid_argument("ConstructionSpec: Z-fields must have no T^2 components");
    }

    // Numerical spanning check for the Z_l on the M factor.
    int m = m_dim();
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    for (int s = 0; s < 64; ++s) {
        std::vector<double> p(ambient_dim);
        for (double& c : p) c = uni(rng);
        Eigen::MatrixXd A(m, 2 * d);
        for (int l = 0; l < 2 * d; ++l) {
            std::vector<double> v = Z[l].eval(p);
            for (int i = 0; i < m; ++i) A(i, l) = v[2 + i];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        const auto& sv = svd.singularValues();
        if (sv(m - 1) < 1e-8 * std::max(sv(0), 1.0))
            throw std::invalid_argument("ConstructionSpec: Z-fields do not span TM at a sample point");
    }
}

ConstructionSpec preset_t4_d1() {
    ConstructionSpec s;
    s.d = 1;
    s.ambient_dim = 4;
    s.h = Expr::cos(1, 2) + Expr::cos(1, 3);
    s.Z = {coordinate_field(4, 2), coordinate_field(4, 3)};
    return s;
}

ConstructionSpec preset_t4_d2_singular() {
    ConstructionSpec s;
    s.d = 2;
    s.ambient_dim = 4;
    s.h = Expr::cos(1, 2) + Expr::cos(1, 3);
    s.Z = {coordinate_field(4, 2), coordinate_field(4, 3),
           coordinate_field(4, 2), coordinate_field(4, 3)};
    return s;
}

ConstructionSpec preset_by_name(const std::string& name) {
    if (name == "t4-d1") return preset_t4_d1();
    if (name == "t4-d2-singular") return preset_t4_d2_singular();
    throw std::invalid_argument("unknown preset: " + name);
}

std::vector<Expr> phi_basis(int d) {
    if (d < 1) throw std::invalid_argument("phi_basis: d must be >= 1");
    std::vector<Expr> phi;
    phi.reserve(2 * d);
    for (int j = 1; j <= d; ++j) {
        phi.push_back(Expr::sin(j, 0));
        phi.push_back(Expr::cos(j, 0));
    }
    return phi;
}

std::pair<VectorField, VectorField> build_construction(const ConstructionSpec& spec) {
    spec.validate();
    int n = spec.ambient_dim;
    std::vector<Expr> vc(n, Expr());
    vc[0] = Expr::constant(1);
    vc[1] = spec.h;
    VectorField V(n, std::move(vc));

    std::vector<Expr> phi = phi_basis(spec.d);
    VectorField W(n);
    for (int l = 0; l < 2 * spec.d; ++l)
        W = W + phi[l] * spec.Z[l];
    return {V, W};
}

VectorField iterated_adjoint(const VectorField& V, const VectorField& W, int alpha) {
    if (alpha < 0) throw std::invalid_argument("iterated_adjoint: alpha < 0");
    VectorField r = W;
    for (int i = 0; i < alpha; ++i) r = lie_bracket(V, r);
    return r;
}

VectorField step1_closed_form(const ConstructionSpec& spec, int alpha) {
    if (alpha < 0) throw std::invalid_argument("step1_closed_form: alpha < 0");
    int n = spec.ambient_dim;
    std::vector<Expr> phi = phi_basis(spec.d);
    VectorField dy = coordinate_field(n, 1);
    VectorField result(n);
    for (int l = 0; l < 2 * spec.d; ++l) {
        Expr da = phi[l];
        for (int i = 0; i < alpha; ++i) da = da.diff(0);
        result = result + da * spec.Z[l];
        if (alpha >= 1) {
            Expr dm = phi[l];
            for (int i = 0; i < alpha - 1; ++i) dm = dm.diff(0);
            Expr zlh = apply_field(spec.Z[l], spec.h);
            result = result - (Expr::constant(alpha) * dm * zlh) * dy;
        }
    }
    return result;
}

std::vector<std::int64_t> lemma_b_coefficients(int d) {
    if (d < 1) throw std::invalid_argument("lemma_b_coefficients: d must be >= 1");
    std::vector<std::int64_t> b(d);
    for (std::int64_t j = 1; j <= d; ++j) {
        std::int64_t prod = 1;
        for (std::int64_t k = 1; k <= d; ++k)
            if (k != j) prod *= k * k - j * j;
        b[j - 1] = prod;
    }
    return b;
}

std::vector<std::int64_t> q_coefficients(int d) {
    if (d < 1) throw std::invalid_argument("q_coefficients: d must be >= 1");
    std::vector<std::int64_t> q = {1};
    for (std::int64_t j = 1; j <= d; ++j) {
        // multiply by (t^2 + j^2)
        std::vector<std::int64_t> next(q.size() + 2, 0);
        for (size_t k = 0; k < q.size(); ++k) {
            next[k] += q[k] * j * j;
            next[k + 2] += q[k];
        }
        q = std::move(next);
    }
    return q;
}

VectorField xi_field(const ConstructionSpec& spec, int r, double tol) {
    if (r < 1 || r > 2 * spec.d)
        throw std::invalid_argument("xi_field: r must satisfy 1 <= r <= 2d");
    auto [V, W] = build_construction(spec);
    std::vector<std::int64_t> q = q_coefficients(spec.d);

    // Route (a): q_k-weighted combination of iterated brackets,
    // xi_r = sum_k q_k D_V^{r+k-1}(W).
    int maxOrder = r + 2 * spec.d - 1;
    std::vector<VectorField> dv;
    dv.push_back(W);
    for (int m = 1; m <= maxOrder; ++m)
        dv.push_back(lie_bracket(V, dv.back()));
    VectorField routeA(spec.ambient_dim);
    for (size_t k = 0; k < q.size(); ++k) {
        if (q[k] == 0) continue;
        routeA = routeA + Expr::constant(q[k]) * dv[r + static_cast<int>(k) - 1];
    }

    // Route (b): closed form -sum_l 2 b_{ceil(l/2)} phi_l^(r) (Z_l h) d/dy.
    std::vector<std::int64_t> b = lemma_b_coefficients(spec.d);
    std::vector<Expr> phi = phi_basis(spec.d);
    VectorField dy = coordinate_field(spec.ambient_dim, 1);
    VectorField routeB(spec.ambient_dim);
    for (int l = 1; l <= 2 * spec.d; ++l) {
        Expr dr = phi[l - 1];
        for (int i = 0; i < r; ++i) dr = dr.diff(0);
        Expr zlh = apply_field(spec.Z[l - 1], spec.h);
        std::int64_t bl = 2 * b[(l + 1) / 2 - 1];
        routeB = routeB - (Expr::constant(bl) * dr * zlh) * dy;
    }

    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    for (int s = 0; s < 1000; ++s) {
        std::vector<double> p(spec.ambient_dim);
        for (double& c : p) c = uni(rng);
        std::vector<double> a = routeA.eval(p);
        std::vector<double> bb = routeB.eval(p);
        for (int i = 0; i < spec.ambient_dim; ++i)
            if (std::abs(a[i] - bb[i]) > tol)
                throw std::runtime_error("xi_field: bracket route and closed form disagree");
    }
    return routeB;
}

double wronskian_min_abs_det(int d, int samples) {
    std::vector<Expr> phi = phi_basis(d);
    // rows r = derivative order 0..2d-1, columns l = basis index
    std::vector<std::vector<Expr>> der(2 * d, std::vector<Expr>(2 * d));
    for (int l = 0; l < 2 * d; ++l) {
        Expr e = phi[l];
        for (int r = 0; r < 2 * d; ++r) {
            der[r][l] = e;
            e = e.diff(0);
        }
    }
    double minDet = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        std::vector<double> p = {2.0 * M_PI * s / samples};
        Eigen::MatrixXd Wm(2 * d, 2 * d);
        for (int r = 0; r < 2 * d; ++r)
            for (int l = 0; l < 2 * d; ++l)
                Wm(r, l) = der[r][l].eval(p);
        minDet = std::min(minDet, std::abs(Wm.determinant()));
    }
    return minDet;
}

} // namespace qklab
