#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qklab/rational.hpp"

namespace qklab {

/// Exact symbolic scalar on the torus: trigonometric polynomials with
/// rational coefficients (plus bare coordinate atoms). Immutable; every
/// constructor returns a normalized value, so structural equality of
/// normalized trees is decidable and differentiation is exact.
///
/// Normal form: a Constant; an atom (Coord, Sin(k*x_i), Cos(k*x_i) with
/// k >= 1); a Product = rational coefficient times a sorted list of
/// non-constant factors; or a Sum of >= 2 terms with pairwise distinct
/// factor signatures (like terms merged, zero terms dropped). Sums may
/// appear as factors of a Product; products are never expanded.
class Expr {
public:
    enum class Kind { Constant, Coord, Sin, Cos, Product, Sum };

    Expr(); // zero

    static Expr constant(Rational c);
    static Expr constant(std::int64_t c) { return constant(Rational(c)); }
    static Expr coord(int index);
    static Expr sin(int multiple, int coordIndex);
    static Expr cos(int multiple, int coordIndex);
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    Expr operator-() const;

    /// Exact partial derivative with respect to coordinate `coordIndex`.
    Expr diff(int coordIndex) const;

    double eval(const std::vector<double>& point) const;

    /// Rebuilds the expression from its parts through the normalizing
    /// constructors. Normalization is idempotent, so this is the identity
    /// on any reachable value; kept as a checkable entry point.
    Expr normalized() const;

    Kind kind() const;
    bool is_zero() const;
    bool is_constant() const;
    Rational constant_value() const; // requires kind Constant

    /// Largest coordinate index referenced, or -1 for constants.
    int max_coord() const;

    std::string str() const;

    /// Total order on normalized expressions (kind, fields, children).
    static int compare(const Expr& a, const Expr& b);
    friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
    friend bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }

private:
    struct Node;
    static std::shared_ptr<const Node> make_node(Node n);
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

} // namespace qklab
