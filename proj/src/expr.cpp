#include "qklab/expr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qklab {

struct Expr::Node {
    Kind kind;
    Rational value;   // Constant value, or Product coefficient
    int mult = 0;     // Sin/Cos integer multiple (>= 1)
    int coord = 0;    // Coord/Sin/Cos coordinate index
    std::vector<Expr> kids;
};

std::shared_ptr<const Expr::Node> Expr::make_node(Node n) {
    return std::make_shared<const Node>(std::move(n));
}

namespace {

int kind_rank(Expr::Kind k) { return static_cast<int>(k); }

} // namespace

Expr::Expr() : node_(make_node({Kind::Constant, Rational(0), 0, 0, {}})) {}

Expr Expr::constant(Rational c) {
    return Expr(make_node({Kind::Constant, c, 0, 0, {}}));
}

Expr Expr::coord(int index) {
    if (index < 0) throw std::invalid_argument("Expr::coord: negative index");
    return Expr(make_node({Kind::Coord, Rational(0), 0, index, {}}));
}

Expr Expr::sin(int multiple, int coordIndex) {
    if (coordIndex < 0) throw std::invalid_argument("Expr::sin: negative coordinate");
    if (multiple == 0) return constant(0);
    if (multiple < 0) return -sin(-multiple, coordIndex);
    return Expr(make_node({Kind::Sin, Rational(0), multiple, coordIndex, {}}));
}

Expr Expr::cos(int multiple, int coordIndex) {
    if (coordIndex < 0) throw std::invalid_argument("Expr::cos: negative coordinate");
    if (multiple == 0) return constant(1);
    if (multiple < 0) multiple = -multiple;
    return Expr(make_node({Kind::Cos, Rational(0), multiple, coordIndex, {}}));
}

int Expr::compare(const Expr& a, const Expr& b) {
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (kind_rank(x.kind) != kind_rank(y.kind))
        return kind_rank(x.kind) < kind_rank(y.kind) ? -1 : 1;
    switch (x.kind) {
    case Kind::Constant:
        if (x.value == y.value) return 0;
        return x.value < y.value ? -1 : 1;
    case Kind::Coord:
        return x.coord == y.coord ? 0 : (x.coord < y.coord ? -1 : 1);
    case Kind::Sin:
    case Kind::Cos:
        if (x.coord != y.coord) return x.coord < y.coord ? -1 : 1;
        return x.mult == y.mult ? 0 : (x.mult < y.mult ? -1 : 1);
    case Kind::Product:
    case Kind::Sum: {
        size_t n = std::min(x.kids.size(), y.kids.size());
        for (size_t i = 0; i < n; ++i) {
            int c = compare(x.kids[i], y.kids[i]);
            if (c != 0) return c;
        }
        if (x.kids.size() != y.kids.size())
            return x.kids.size() < y.kids.size() ? -1 : 1;
        if (x.kind == Kind::Product && !(x.value == y.value))
            return x.value < y.value ? -1 : 1;
        return 0;
    }
    }
    return 0;
}

Expr Expr::product(std::vector<Expr> factors) {
    Rational coeff(1);
    std::vector<Expr> fs;
    for (const Expr& f : factors) {
        const Node& n = *f.node_;
        switch (n.kind) {
        case Kind::Constant:
            coeff = coeff * n.value;
            break;
        case Kind::Product:
            coeff = coeff * n.value;
            fs.insert(fs.end(), n.kids.begin(), n.kids.end());
            break;
        default:
            fs.push_back(f);
        }
    }
    if (coeff.is_zero()) return constant(0);
    if (fs.empty()) return constant(coeff);
    std::sort(fs.begin(), fs.end(),
              [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
    if (coeff.is_one() && fs.size() == 1) return fs[0];
    return Expr(make_node({Kind::Product, coeff, 0, 0, std::move(fs)}));
}

Expr Expr::sum(std::vector<Expr> terms) {
    // Each term is reduced to (rational coefficient, sorted factor list);
    // like terms merge by factor-list signature, zero coefficients drop.
    struct Term {
        Rational coeff;
        std::vector<Expr> factors;
    };
    std::vector<Term> ts;
    auto push = [&ts](const Expr& t, auto&& self) -> void {
        const Node& n = *t.node_;
        switch (n.kind) {
        case Kind::Constant:
            ts.push_back({n.value, {}});
            break;
        case Kind::Product:
            ts.push_back({n.value, n.kids});
            break;
        case Kind::Sum:
            for (const Expr& k : n.kids) self(k, self);
            break;
        default:
            ts.push_back({Rational(1), {t}});
        }
    };
    for (const Expr& t : terms) push(t, push);

    auto sig_less = [](const std::vector<Expr>& a, const std::vector<Expr>& b) {
        size_t n = std::min(a.size(), b.size());
        for (size_t i = 0; i < n; ++i) {
            int c = compare(a[i], b[i]);
            if (c != 0) return c < 0;
        }
        return a.size() < b.size();
    };
    auto sig_eq = [](const std::vector<Expr>& a, const std::vector<Expr>& b) {
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i)
            if (compare(a[i], b[i]) != 0) return false;
        return true;
    };
    std::sort(ts.begin(), ts.end(),
              [&](const Term& a, const Term& b) { return sig_less(a.factors, b.factors); });

    std::vector<Expr> out;
    size_t i = 0;
    while (i < ts.size()) {
        Rational c = ts[i].coeff;
        size_t j = i + 1;
        while (j < ts.size() && sig_eq(ts[i].factors, ts[j].factors)) {
            c = c + ts[j].coeff;
            ++j;
        }
        if (!c.is_zero()) {
            if (ts[i].factors.empty()) {
                out.push_back(constant(c));
            } else if (c.is_one() && ts[i].factors.size() == 1) {
                out.push_back(ts[i].factors[0]);
            } else {
                std::vector<Expr> fs = ts[i].factors;
                out.push_back(Expr(make_node({Kind::Product, c, 0, 0, std::move(fs)})));
            }
        }
        i = j;
    }
    if (out.empty()) return constant(0);
    if (out.size() == 1) return out[0];
    std::sort(out.begin(), out.end(),
              [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
    return Expr(make_node({Kind::Sum, Rational(0), 0, 0, std::move(out)}));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }

Expr Expr::operator-() const { return product({constant(-1), *this}); }

Expr Expr::diff(int coordIndex) const {
    const Node& n = *node_;
    switch (n.kind) {
    case Kind::Constant:
        return constant(0);
    case Kind::Coord:
        return constant(n.coord == coordIndex ? 1 : 0);
    case Kind::Sin:
        if (n.coord != coordIndex) return constant(0);
        return constant(n.mult) * cos(n.mult, n.coord);
    case Kind::Cos:
        if (n.coord != coordIndex) return constant(0);
        return constant(-n.mult) * sin(n.mult, n.coord);
    case Kind::Sum: {
        std::vector<Expr> ds;
        ds.reserve(n.kids.size());
        for (const Expr& k : n.kids) ds.push_back(k.diff(coordIndex));
        return sum(std::move(ds));
    }
    case Kind::Product: {
        std::vector<Expr> terms;
        for (size_t j = 0; j < n.kids.size(); ++j) {
            std::vector<Expr> fs;
            fs.push_back(constant(n.value));
            for (size_t l = 0; l < n.kids.size(); ++l)
                fs.push_back(l == j ? n.kids[l].diff(coordIndex) : n.kids[l]);
            terms.push_back(product(std::move(fs)));
        }
        return sum(std::move(terms));
    }
    }
    return constant(0);
}

double Expr::eval(const std::vector<double>& point) const {
    const Node& n = *node_;
    switch (n.kind) {
    case Kind::Constant:
        return n.value.value();
    case Kind::Coord:
        if (n.coord >= static_cast<int>(point.size()))
            throw std::invalid_argument("Expr::eval: point dimension too small");
        return point[n.coord];
    case Kind::Sin:
        if (n.coord >= static_cast<int>(point.size()))
            throw std::invalid_argument("Expr::eval: point dimension too small");
        return std::sin(n.mult * point[n.coord]);
    case Kind::Cos:
        if (n.coord >= static_cast<int>(point.size()))
            throw std::invalid_argument("Expr::eval: point dimension too small");
        return std::cos(n.mult * point[n.coord]);
    case Kind::Sum: {
        double s = 0.0;
        for (const Expr& k : n.kids) s += k.eval(point);
        return s;
    }
    case Kind::Product: {
        double p = n.value.value();
        for (const Expr& k : n.kids) p *= k.eval(point);
        return p;
    }
    }
    return 0.0;
}

Expr Expr::normalized() const {
    const Node& n = *node_;
    switch (n.kind) {
    case Kind::Constant:
        return constant(n.value);
    case Kind::Coord:
        return coord(n.coord);
    case Kind::Sin:
        return sin(n.mult, n.coord);
    case Kind::Cos:
        return cos(n.mult, n.coord);
    case Kind::Sum: {
        std::vector<Expr> ks;
        for (const Expr& k : n.kids) ks.push_back(k.normalized());
        return sum(std::move(ks));
    }
    case Kind::Product: {
        std::vector<Expr> ks;
        ks.push_back(constant(n.value));
        for (const Expr& k : n.kids) ks.push_back(k.normalized());
        return product(std::move(ks));
    }
    }
    return *this;
}

Expr::Kind Expr::kind() const { return node_->kind; }

bool Expr::is_zero() const {
    return node_->kind == Kind::Constant && node_->value.is_zero();
}

bool Expr::is_constant() const { return node_->kind == Kind::Constant; }

Rational Expr::constant_value() const {
    if (node_->kind != Kind::Constant)
        throw std::logic_error("Expr::constant_value: not a constant");
    return node_->value;
}

int Expr::max_coord() const {
    const Node& n = *node_;
    switch (n.kind) {
    case Kind::Constant:
        return -1;
    case Kind::Coord:
    case Kind::Sin:
    case Kind::Cos:
        return n.coord;
    default: {
        int m = -1;
        for (const Expr& k : n.kids) m = std::max(m, k.max_coord());
        return m;
    }
    }
}

std::string Expr::str() const {
    const Node& n = *node_;
    auto rat = [](const Rational& r) {
        std::string s = std::to_string(r.num);
        if (r.den != 1) s += "/" + std::to_string(r.den);
        return s;
    };
    switch (n.kind) {
    case Kind::Constant:
        return rat(n.value);
    case Kind::Coord:
        return "x" + std::to_string(n.coord);
    case Kind::Sin:
    case Kind::Cos: {
        std::string f = n.kind == Kind::Sin ? "sin" : "cos";
        std::string arg = (n.mult == 1 ? "" : std::to_string(n.mult) + "*");
        return f + "(" + arg + "x" + std::to_string(n.coord) + ")";
    }
    case Kind::Product: {
        std::string s = n.value.is_one() ? "" : rat(n.value) + "*";
        for (size_t i = 0; i < n.kids.size(); ++i) {
            if (i > 0 || !s.empty()) if (i > 0) s += "*";
            const Expr& k = n.kids[i];
            s += k.kind() == Kind::Sum ? "(" + k.str() + ")" : k.str();
        }
        return s;
    }
    case Kind::Sum: {
        std::string s;
        for (size_t i = 0; i < n.kids.size(); ++i) {
            if (i > 0) s += " + ";
            s += n.kids[i].str();
        }
        return s;
    }
    }
    return "?";
}

} // namespace qklab
