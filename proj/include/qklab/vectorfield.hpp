#pragma once

#include <vector>

#include "qklab/expr.hpp"

namespace qklab {

/// Vector field on the flat torus T^n with one exact symbolic coefficient
/// per coordinate direction. Immutable value type.
class VectorField {
public:
    explicit VectorField(int dimension);
    VectorField(int dimension, std::vector<Expr> coefficients);

    int dimension() const { return dim_; }
    const Expr& coefficient(int i) const { return coeff_[i]; }
    const std::vector<Expr>& coefficients() const { return coeff_; }

    std::vector<double> eval(const std::vector<double>& point) const;

    bool is_zero() const;
    friend bool operator==(const VectorField& a, const VectorField& b);

    friend VectorField operator+(const VectorField& a, const VectorField& b);
    friend VectorField operator-(const VectorField& a, const VectorField& b);
    /// Componentwise multiplication by a scalar expression.
    friend VectorField operator*(const Expr& f, const VectorField& X);

    std::string str() const;

private:
    int dim_;
    std::vector<Expr> coeff_;
};

/// Coordinate field d/dx_i on T^n.
VectorField coordinate_field(int dimension, int axis);

/// Lie bracket [X,Y]^j = sum_i (X^i d_i Y^j - Y^i d_i X^j), exact.
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

/// Divergence with respect to the flat volume form: sum_i d_i X^i.
Expr divergence(const VectorField& X);

/// Application of X to a scalar: X(f) = sum_i X^i d_i f.
Expr apply_field(const VectorField& X, const Expr& f);

} // namespace qklab
