#include "qklab/vectorfield.hpp"

#include <stdexcept>

namespace qklab {

VectorField::VectorField(int dimension)
    : dim_(dimension), coeff_(dimension, Expr()) {
    if (dimension < 1) throw std::invalid_argument("VectorField: dimension < 1");
}

VectorField::VectorField(int dimension, std::vector<Expr> coefficients)
    : dim_(dimension), coeff_(std::move(coefficients)) {
    if (dimension < 1) throw std::invalid_argument("VectorField: dimension < 1");
    if (static_cast<int>(coeff_.size()) != dimension)
        throw std::invalid_argument("VectorField: coefficient count != dimension");
    for (const Expr& c : coeff_)
        if (c.max_coord() >= dimension)
            throw std::invalid_argument("VectorField: coefficient uses out-of-range coordinate");
}

std::vector<double> VectorField::eval(const std::vector<double>& point) const {
    std::vector<double> v(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = coeff_[i].eval(point);
    return v;
}

bool VectorField::is_zero() const {
    for (const Expr& c : coeff_)
        if (!c.is_zero()) return false;
    return true;
}

bool operator==(const VectorField& a, const VectorField& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
        if (a.coeff_[i] != b.coeff_[i]) return false;
    return true;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("VectorField +: dimension mismatch");
    std::vector<Expr> c(a.dim_);
    for (int i = 0; i < a.dim_; ++i) c[i] = a.coeff_[i] + b.coeff_[i];
    return VectorField(a.dim_, std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("VectorField -: dimension mismatch");
    std::vector<Expr> c(a.dim_);
    for (int i = 0; i < a.dim_; ++i) c[i] = a.coeff_[i] - b.coeff_[i];
    return VectorField(a.dim_, std::move(c));
}

VectorField operator*(const Expr& f, const VectorField& X) {
    std::vector<Expr> c(X.dim_);
    for (int i = 0; i < X.dim_; ++i) c[i] = f * X.coeff_[i];
    return VectorField(X.dim_, std::move(c));
}

std::string VectorField::str() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
        if (i > 0) s += ", ";
        s += coeff_[i].str();
    }
    return s + ")";
}

VectorField coordinate_field(int dimension, int axis) {
    if (axis < 0 || axis >= dimension)
        throw std::invalid_argument("coordinate_field: axis out of range");
    std::vector<Expr> c(dimension, Expr());
    c[axis] = Expr::constant(1);
    return VectorField(dimension, std::move(c));
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    if (X.dimension() != Y.dimension())
        throw std::invalid_argument("lie_bracket: dimension mismatch");
    int n = X.dimension();
    std::vector<Expr> c(n);
    for (int j = 0; j < n; ++j) {
        std::vector<Expr> terms;
        for (int i = 0; i < n; ++i) {
            terms.push_back(X.coefficient(i) * Y.coefficient(j).diff(i));
            terms.push_back(-(Y.coefficient(i) * X.coefficient(j).diff(i)));
        }
        c[j] = Expr::sum(std::move(terms));
    }
    return VectorField(n, std::move(c));
}

Expr divergence(const VectorField& X) {
    std::vector<Expr> terms;
    for (int i = 0; i < X.dimension(); ++i)
        terms.push_back(X.coefficient(i).diff(i));
    return Expr::sum(std::move(terms));
}

Expr apply_field(const VectorField& X, const Expr& f) {
    std::vector<Expr> terms;
    for (int i = 0; i < X.dimension(); ++i)
        terms.push_back(X.coefficient(i) * f.diff(i));
    return Expr::sum(std::move(terms));
}

} // namespace qklab
