#include "qklab/quasikahler.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace qklab {

BaseStructure base_structure(int n) {
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("base_structure: n must be even and >= 4");
    BaseStructure b;
    b.n = n;
    b.omega = Eigen::MatrixXd::Zero(n, n);
    b.J = Eigen::MatrixXd::Zero(n, n);
    b.g = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; i += 2) {
        b.omega(i, i + 1) = 1.0;
        b.omega(i + 1, i) = -1.0;
        b.J(i + 1, i) = 1.0;  // J e_{2k}   =  e_{2k+1}
        b.J(i, i + 1) = -1.0; // J e_{2k+1} = -e_{2k}
    }
    return b;
}

double omega_pairing(const BaseStructure& base,
                     const std::vector<double>& u, const std::vector<double>& v) {
    if (static_cast<int>(u.size()) != base.n || static_cast<int>(v.size()) != base.n)
        throw std::invalid_argument("omega_pairing: dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> uu(u.data(), base.n), vv(v.data(), base.n);
    return uu.dot(base.omega * vv);
}

double isotropy_check(const VectorField& V, const VectorField& W,
                      const BaseStructure& base,
                      const std::vector<std::vector<double>>& samples) {
    if (V.dimension() != base.n || W.dimension() != base.n)
        throw std::invalid_argument("isotropy_check: dimension mismatch");
    double m = 0.0;
    for (const auto& p : samples) {
        std::vector<double> v = V.eval(p), w = W.eval(p);
        m = std::max(m, std::abs(omega_pairing(base, v, w)));
        m = std::max(m, std::abs(omega_pairing(base, v, v)));
        m = std::max(m, std::abs(omega_pairing(base, w, w)));
    }
    return m;
}

double bump_value(double dist, double delta, double phiMax) {
    if (dist <= delta) return 1.0;
    if (dist >= 2.0 * delta) return phiMax;
    double t = (dist - delta) / delta;
    double s = t * t * t * (t * (6.0 * t - 15.0) + 10.0); // 6t^5 - 15t^4 + 10t^3
    return 1.0 + (phiMax - 1.0) * s;
}

std::vector<double> build_bump(const SingularReport& singular, double delta,
                               double phiMax, const PeriodicGrid& grid, double offset) {
    if (phiMax < 1.0) throw std::invalid_argument("build_bump: phiMax must be >= 1");
    std::size_t count = grid.node_count();
    if (singular.empty)
        return std::vector<double>(count, phiMax);
    if (delta <= 0)
        throw std::invalid_argument("build_bump: delta must be positive for a nonempty singular set");

    std::vector<double> phi(count);
    bool plateau = false;
    for (std::size_t idx = 0; idx < count; ++idx) {
        double x = grid.point_of(idx)[0] + offset;
        double dist = std::numeric_limits<double>::infinity();
        for (double xr : singular.x_roots) {
            double d = std::abs(x - xr);
            d = std::min(d, 2.0 * M_PI - d); // torus wraparound
            dist = std::min(dist, d);
        }
        phi[idx] = bump_value(dist, delta, phiMax);
        if (dist >= 2.0 * delta) plateau = true;
    }
    if (!plateau)
        throw std::invalid_argument("build_bump: 2*delta neighborhoods cover the torus, no plateau region");
    return phi;
}

Eigen::MatrixXd metric_at(const std::vector<double>& Vp, const std::vector<double>& Wp,
                          double phi, const BaseStructure& base, double tol) {
    int n = base.n;
    if (phi < 1.0) throw std::invalid_argument("metric_at: phi must be >= 1");
    if (phi == 1.0) return Eigen::MatrixXd::Identity(n, n);

    Eigen::Map<const Eigen::VectorXd> v(Vp.data(), n), w(Wp.data(), n);
    double vn = v.norm();
    if (vn < tol)
        throw std::runtime_error("metric_at: degenerate span with phi != 1");
    Eigen::VectorXd e1 = v / vn;
    Eigen::VectorXd w2 = w - w.dot(e1) * e1;
    double r = w2.norm();
    if (r < tol)
        throw std::runtime_error("metric_at: degenerate span with phi != 1");
    Eigen::VectorXd e2 = w2 / r;

    Eigen::MatrixXd F(n, n);
    F.col(0) = e1;
    F.col(1) = e2;
    F.col(2) = base.J * e1;
    F.col(3) = base.J * e2;
    int have = 4;
    for (int i = 0; i < n && have < n; ++i) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        c(i) = 1.0;
        for (int j = 0; j < have; ++j) c -= c.dot(F.col(j)) * F.col(j);
        double cn = c.norm();
        if (cn > 1e-6) F.col(have++) = c / cn;
    }
    if (have < n) throw std::runtime_error("metric_at: failed to complete orthonormal frame");

    Eigen::VectorXd d(n);
    d(0) = 1.0 / phi;
    d(1) = 1.0 / phi;
    d(2) = phi;
    d(3) = phi;
    for (int i = 4; i < n; ++i) d(i) = 1.0;

    Eigen::MatrixXd g = F * d.asDiagonal() * F.transpose();
    g = 0.5 * (g + g.transpose()); // exact symmetry
    return g;
}

double MetricField::max_det_defect() const {
    double m = 0.0;
    for (const auto& gm : g)
        m = std::max(m, std::abs(gm.determinant() - 1.0));
    return m;
}

void MetricField::write_csv(std::ostream& os) const {
    os << "# node";
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) os << ",g" << i << j;
    os << ",phi\n";
    for (std::size_t k = 0; k < g.size(); ++k) {
        os << k;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) os << "," << g[k](i, j);
        os << "," << phi[k] << "\n";
    }
}

MetricField build_metric_field(const PeriodicGrid& grid, const VectorField& V,
                               const VectorField& W, const std::vector<double>& phiField,
                               const BaseStructure& base, double tol, double offset) {
    if (phiField.size() != grid.node_count())
        throw std::invalid_argument("build_metric_field: phi field size mismatch");
    std::size_t count = grid.node_count();
    MetricField mf;
    mf.n = base.n;
    mf.g.resize(count);
    mf.ginv.resize(count);
    mf.phi = phiField;

    std::vector<std::string> errors(1);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(count); ++idx) {
        try {
            std::vector<double> p = grid.point_of(static_cast<std::size_t>(idx));
            for (double& x : p) x += offset;
            std::vector<double> vp = V.eval(p), wp = W.eval(p);
            Eigen::MatrixXd g = metric_at(vp, wp, phiField[idx], base, tol);
            double det = g.determinant();
            if (std::abs(det - 1.0) > 1e-10)
                throw std::runtime_error("build_metric_field: det g != 1 at node "
                                         + std::to_string(idx));
            mf.g[idx] = g;
            mf.ginv[idx] = g.inverse();
            mf.ginv[idx] = 0.5 * (mf.ginv[idx] + mf.ginv[idx].transpose().eval());
        } catch (const std::exception& e) {
#pragma omp critical
            errors[0] = e.what();
        }
    }
    if (!errors[0].empty()) throw std::runtime_error(errors[0]);
    return mf;
}

double inv_phi_norm(const std::vector<double>& phiField, double p,
                    const PeriodicGrid& grid) {
    if (!(p > 1.0 && p < 2.0))
        throw std::invalid_argument("inv_phi_norm: p must lie in (1,2)");
    if (phiField.size() != grid.node_count())
        throw std::invalid_argument("inv_phi_norm: phi field size mismatch");
    double s = p / (2.0 - p);
    double sum = 0.0;
    for (double phi : phiField) sum += std::pow(phi, -s);
    sum *= grid.cell_volume();
    return std::pow(sum, 1.0 / s);
}

} // namespace qklab
