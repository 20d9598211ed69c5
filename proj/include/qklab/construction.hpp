#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qklab/vectorfield.hpp"

namespace qklab {

/// Input data for the two-field construction on T^2 x M with M = T^m:
/// a frequency-pair count d, a Morse function h(z), and 2d fields Z_l
/// spanning the tangent space of M at every point. Ambient coordinate
/// layout: 0 = x, 1 = y (the T^2 factor), 2..n-1 = z (the M factor).
struct ConstructionSpec {
    int d = 1;
    int ambient_dim = 4;
    Expr h;                      // depends on z coordinates only
    std::vector<VectorField> Z;  // 2d fields, z-components only

    int m_dim() const { return ambient_dim - 2; }

    /// Checks structural invariants and that the Z_l span TM numerically
    /// at sampled points. Throws std::invalid_argument on failure.
    void validate() const;
};

/// d=1 on T^4, h = cos z1 + cos z2, Z = {d/dz1, d/dz2}. W never vanishes.
ConstructionSpec preset_t4_d1();

/// d=2 on T^4 with Z3 = Z1, Z4 = Z2: the singular set is the plane x = pi.
ConstructionSpec preset_t4_d2_singular();

/// Lookup by CLI name ("t4-d1", "t4-d2-singular").
ConstructionSpec preset_by_name(const std::string& name);

/// Oscillator basis phi_{2j-1} = sin(jx), phi_{2j} = cos(jx), 1 <= j <= d,
/// returned 0-indexed (phi[l-1] = phi_l).
std::vector<Expr> phi_basis(int d);

/// V = d/dx + h(z) d/dy,  W = sum_l phi_l(x) Z_l.
std::pair<VectorField, VectorField> build_construction(const ConstructionSpec& spec);

/// Iterated adjoint D_V^alpha(W) = [V,[V,...[V,W]]] via symbolic brackets.
VectorField iterated_adjoint(const VectorField& V, const VectorField& W, int alpha);

/// Closed form of D_V^alpha(W):
///   sum_l phi_l^(alpha) Z_l - alpha phi_l^(alpha-1) (Z_l h) d/dy,
/// built symbolically without bracketing.
VectorField step1_closed_form(const ConstructionSpec& spec, int alpha);

/// b_j = prod_{k != j} (k^2 - j^2) for 1 <= j <= d; all nonzero.
std::vector<std::int64_t> lemma_b_coefficients(int d);

/// Integer coefficients of Q(t) = prod_{j=1}^{d} (t^2 + j^2),
/// index = power of t (size 2d+1, odd entries zero).
std::vector<std::int64_t> q_coefficients(int d);

/// xi_r = sum_k q_k D_V^{r+k-1}(W), computed both as the bracket
/// combination and as the closed form
///   -sum_l 2 b_{ceil(l/2)} phi_l^(r) (Z_l h) d/dy.
/// The two are compared at random sample points; disagreement beyond
/// `tol` throws std::runtime_error. Returns the closed form.
VectorField xi_field(const ConstructionSpec& spec, int r, double tol = 1e-8);

/// min over `samples` uniformly spaced x of |det (phi_l^(r)(x))|,
/// the 2d x 2d Wronskian of the oscillator basis.
double wronskian_min_abs_det(int d, int samples);

} // namespace qklab
