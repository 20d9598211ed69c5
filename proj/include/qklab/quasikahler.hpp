#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "qklab/grid.hpp"
#include "qklab/hormander.hpp"
#include "qklab/vectorfield.hpp"

namespace qklab {

/// Flat base quasi-Kahler structure on T^n (n even): omega pairs the
/// coordinate axes (x,y), (z1,z2), ..., J1 rotates each pair, g1 = I.
struct BaseStructure {
    int n;
    Eigen::MatrixXd omega;
    Eigen::MatrixXd J;
    Eigen::MatrixXd g;
};

BaseStructure base_structure(int n);

/// omega(u, v) for the base structure.
double omega_pairing(const BaseStructure& base,
                     const std::vector<double>& u, const std::vector<double>& v);

/// max over samples of |omega(V,W)|, |omega(V,V)|, |omega(W,W)|.
double isotropy_check(const VectorField& V, const VectorField& W,
                      const BaseStructure& base,
                      const std::vector<std::vector<double>>& samples);

/// Quintic smoothstep bump profile: 1 within distance delta of the
/// singular set, phiMax beyond 2*delta, C^2 in between.
double bump_value(double dist, double delta, double phiMax);

/// Samples the bump on the grid from the singular report's x-root planes
/// (torus distance in x, exact for the presets). Empty singular set gives
/// the constant field phiMax. Throws if no node reaches the plateau.
/// `offset` shifts every sample point, e.g. spacing/2 for cell centers.
std::vector<double> build_bump(const SingularReport& singular, double delta,
                               double phiMax, const PeriodicGrid& grid,
                               double offset = 0.0);

/// Pointwise deformed metric: g1-orthonormal frame (e1, e2) from (Vp, Wp),
/// columns (e1, e2, J e1, J e2, orthocomplement), scaled 1/phi on the
/// distribution plane, phi on its J image, 1 on the rest. phi = 1 returns
/// g1 without building a frame; a degenerate span with phi != 1 throws.
Eigen::MatrixXd metric_at(const std::vector<double>& Vp, const std::vector<double>& Wp,
                          double phi, const BaseStructure& base, double tol = 1e-8);

/// Grid-sampled metric, its inverse, and the phi value per node.
/// det g = 1 is checked at every node during assembly.
struct MetricField {
    int n = 0;
    std::vector<Eigen::MatrixXd> g;
    std::vector<Eigen::MatrixXd> ginv;
    std::vector<double> phi;

    double max_det_defect() const; // max |det g - 1| over nodes

    /// Debug dump: node index, upper-triangle entries of g, phi.
    void write_csv(std::ostream& os) const;
};

/// `offset` shifts the evaluation points on every axis; pair it with the
/// same offset in build_bump. Cell-centered metrics (offset = spacing/2)
/// feed the Laplace-Beltrami assembly without any interpolation.
MetricField build_metric_field(const PeriodicGrid& grid, const VectorField& V,
                               const VectorField& W, const std::vector<double>& phiField,
                               const BaseStructure& base, double tol = 1e-8,
                               double offset = 0.0);

/// ||1/phi||_{L^{p/(2-p)}} by grid quadrature, 1 < p < 2.
double inv_phi_norm(const std::vector<double>& phiField, double p,
                    const PeriodicGrid& grid);

} // namespace qklab
