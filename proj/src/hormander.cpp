#include "qklab/hormander.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qklab {

struct BracketWord::Node {
    int generator = -1; // >= 0 for leaves
    std::shared_ptr<const Node> left, right;
    int length = 1;
};

BracketWord BracketWord::leaf(int generator) {
    if (generator < 0) throw std::invalid_argument("BracketWord::leaf: negative index");
    auto n = std::make_shared<Node>();
    n->generator = generator;
    return BracketWord(n);
}

BracketWord BracketWord::bracket(const BracketWord& left, const BracketWord& right) {
    auto n = std::make_shared<Node>();
    n->left = left.node_;
    n->right = right.node_;
    n->length = left.length() + right.length();
    return BracketWord(n);
}

int BracketWord::length() const { return node_->length; }
bool BracketWord::is_leaf() const { return node_->generator >= 0; }
int BracketWord::generator() const { return node_->generator; }

BracketWord BracketWord::left() const { return BracketWord(node_->left); }
BracketWord BracketWord::right() const { return BracketWord(node_->right); }

std::string BracketWord::str(const std::vector<std::string>& names) const {
    const Node& n = *node_;
    if (n.generator >= 0) {
        if (n.generator < static_cast<int>(names.size())) return names[n.generator];
        return "g" + std::to_string(n.generator);
    }
    return "[" + BracketWord(n.left).str(names) + "," + BracketWord(n.right).str(names) + "]";
}

std::vector<GeneratedBracket> generate_brackets(const std::vector<VectorField>& generators,
                                                int maxDepth, int maxFields) {
    if (maxDepth < 1) throw std::invalid_argument("generate_brackets: maxDepth < 1");
    if (generators.empty()) throw std::invalid_argument("generate_brackets: no generators");

    std::vector<GeneratedBracket> out;
    auto add = [&](const BracketWord& w, const VectorField& f) {
        if (f.is_zero()) return; // contributes nothing to the span
        for (const GeneratedBracket& g : out)
            if (g.field == f) return;
        out.push_back({w, f});
        if (static_cast<int>(out.size()) > maxFields)
            throw std::runtime_error("generate_brackets: field cap exceeded ("
                                     + std::to_string(maxFields) + ")");
    };

    for (size_t i = 0; i < generators.size(); ++i)
        add(BracketWord::leaf(static_cast<int>(i)), generators[i]);

    // Structured adjoint families for the two-generator case (V, W):
    // D_V^a(W) and D_V^c D_W D_V^b(W). Generated before the generic
    // left-normed words so they survive the cap.
    if (generators.size() == 2) {
        const VectorField& V = generators[0];
        const VectorField& W = generators[1];
        BracketWord wv = BracketWord::leaf(0);
        BracketWord ww = BracketWord::leaf(1);

        std::vector<std::pair<BracketWord, VectorField>> adV; // D_V^b(W), b >= 0
        adV.emplace_back(ww, W);
        for (int b = 1; b + 1 <= maxDepth; ++b) {
            adV.emplace_back(BracketWord::bracket(wv, adV.back().first),
                             lie_bracket(V, adV.back().second));
            add(adV.back().first, adV.back().second);
        }
        for (const auto& [bw, bf] : adV) {
            int base = bw.length() + 1;
            if (base > maxDepth) continue;
            BracketWord cur = BracketWord::bracket(ww, bw);
            VectorField curF = lie_bracket(W, bf);
            add(cur, curF);
            for (int c = 1; base + c <= maxDepth; ++c) {
                cur = BracketWord::bracket(wv, cur);
                curF = lie_bracket(V, curF);
                add(cur, curF);
            }
        }
    }

    // Generic left-normed words [[...[g_{i1}, g_{i2}], g_{i3}]...].
    std::vector<std::pair<BracketWord, VectorField>> level;
    for (size_t i = 0; i < generators.size(); ++i)
        level.emplace_back(BracketWord::leaf(static_cast<int>(i)), generators[i]);
    for (int depth = 2; depth <= maxDepth; ++depth) {
        std::vector<std::pair<BracketWord, VectorField>> next;
        for (const auto& [w, f] : level) {
            for (size_t i = 0; i < generators.size(); ++i) {
                BracketWord nw = BracketWord::bracket(w, BracketWord::leaf(static_cast<int>(i)));
                VectorField nf = lie_bracket(f, generators[i]);
                add(nw, nf);
                next.emplace_back(nw, nf);
            }
        }
        level = std::move(next);
    }
    return out;
}

RankReport rank_report(const std::vector<VectorField>& fields,
                       const std::vector<std::vector<double>>& samples,
                       double tol, int depthUsed) {
    if (samples.empty()) throw std::invalid_argument("rank_report: empty sample set");
    if (fields.empty()) throw std::invalid_argument("rank_report: no fields");
    if (tol <= 0) throw std::invalid_argument("rank_report: tol must be positive");
    int n = fields[0].dimension();
    int m = static_cast<int>(fields.size());

    RankReport rep;
    rep.points_sampled = static_cast<int>(samples.size());
    rep.depth_used = depthUsed;
    rep.sv_threshold = tol;
    rep.ranks.assign(samples.size(), 0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(samples.size()); ++s) {
        Eigen::MatrixXd A(n, m);
        for (int j = 0; j < m; ++j) {
            std::vector<double> v = fields[j].eval(samples[s]);
            for (int i = 0; i < n; ++i) A(i, j) = v[i];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        const auto& sv = svd.singularValues();
        double smax = sv(0);
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > tol * smax) ++rank;
        rep.ranks[s] = smax == 0.0 ? 0 : rank;
    }

    rep.min_rank = *std::min_element(rep.ranks.begin(), rep.ranks.end());
    for (size_t s = 0; s < samples.size(); ++s)
        if (rep.ranks[s] < n)
            rep.deficient_points.push_back({samples[s], rep.ranks[s]});
    return rep;
}

std::string RankReport::to_json() const {
    nlohmann::json j;
    j["points_sampled"] = points_sampled;
    j["min_rank"] = min_rank;
    j["depth_used"] = depth_used;
    j["sv_threshold"] = sv_threshold;
    j["deficient_points"] = nlohmann::json::array();
    for (const auto& d : deficient_points)
        j["deficient_points"].push_back({{"point", d.point}, {"rank", d.rank}});
    return j.dump(2);
}

std::vector<std::vector<double>> hormander_samples(const PeriodicGrid& grid,
                                                   int latticeCount,
                                                   const std::vector<double>& singularX) {
    int n = grid.dimension();
    std::vector<std::vector<double>> pts;

    // Kronecker lattice with square-root-of-prime generators.
    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    for (int i = 1; i <= latticeCount; ++i) {
        std::vector<double> p(n);
        for (int j = 0; j < n; ++j) {
            double a = i * std::sqrt(primes[j % 8]);
            p[j] = 2.0 * M_PI * (a - std::floor(a));
        }
        pts.push_back(std::move(p));
    }

    for (std::size_t idx = 0; idx < grid.node_count(); ++idx)
        pts.push_back(grid.point_of(idx));

    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    for (double xr : singularX) {
        for (int i = 0; i < 64; ++i) {
            std::vector<double> p(n);
            p[0] = xr;
            for (int j = 1; j < n; ++j) p[j] = uni(rng);
            pts.push_back(std::move(p));
        }
    }
    return pts;
}

namespace {

// Newton iteration on the derivative of F(x) = |W(x,z)|^2 within one
// fiber, bisection fallback on a bracketing sign change of F'.
struct FiberRootFinder {
    const std::vector<Expr>* w;
    const std::vector<Expr>* wx;
    const std::vector<Expr>* wxx;
    std::vector<double> point; // fiber point; slot 0 is overwritten with x

    double normsq(double x) {
        point[0] = x;
        double s = 0;
        for (const Expr& e : *w) {
            double v = e.eval(point);
            s += v * v;
        }
        return s;
    }
    double dnormsq(double x) {
        point[0] = x;
        double s = 0;
        for (size_t i = 0; i < w->size(); ++i)
            s += 2.0 * (*w)[i].eval(point) * (*wx)[i].eval(point);
        return s;
    }
    double ddnormsq(double x) {
        point[0] = x;
        double s = 0;
        for (size_t i = 0; i < w->size(); ++i) {
            double v = (*w)[i].eval(point);
            double d = (*wx)[i].eval(point);
            s += 2.0 * (d * d + v * (*wxx)[i].eval(point));
        }
        return s;
    }
};

} // namespace

SingularReport find_singular_set(const ConstructionSpec& spec,
                                 const PeriodicGrid& grid, double tol) {
    if (tol <= 0) throw std::invalid_argument("find_singular_set: tol must be positive");
    auto [V, W] = build_construction(spec);
    int n = spec.ambient_dim;

    std::vector<Expr> w(n), wx(n), wxx(n);
    for (int i = 0; i < n; ++i) {
        w[i] = W.coefficient(i);
        wx[i] = w[i].diff(0);
        wxx[i] = wx[i].diff(0);
    }

    SingularReport rep;

    // Generic dimension of span(V, W): max numerical rank over random points.
    {
        std::mt19937_64 rng(999);
        std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
        int best = 0;
        for (int s = 0; s < 200; ++s) {
            std::vector<double> p(n);
            for (double& c : p) c = uni(rng);
            Eigen::MatrixXd A(n, 2);
            std::vector<double> vv = V.eval(p), wv = W.eval(p);
            for (int i = 0; i < n; ++i) { A(i, 0) = vv[i]; A(i, 1) = wv[i]; }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
            int r = 0;
            for (int i = 0; i < 2; ++i)
                if (svd.singularValues()(i) > 1e-10 * std::max(svd.singularValues()(0), 1.0)) ++r;
            best = std::max(best, r);
        }
        rep.generic_dim = best;
    }

    // Per-fiber root finding. W as built never involves y, so fibers are
    // enumerated over the z grid with y = 0.
    int m = spec.m_dim();
    int N = grid.nodes_per_axis();
    double h = grid.spacing();
    std::size_t fibers = 1;
    for (int i = 0; i < m; ++i) fibers *= static_cast<std::size_t>(N);
    rep.fibers_checked = static_cast<int>(fibers);

    const int S = 256; // dense x samples per fiber
    std::vector<std::vector<double>> found(fibers);
    std::vector<int> fallbacks(fibers, 0);
    std::vector<double> residuals(fibers, 0.0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t f = 0; f < static_cast<std::ptrdiff_t>(fibers); ++f) {
        FiberRootFinder rf{&w, &wx, &wxx, std::vector<double>(n, 0.0)};
        std::size_t rem = static_cast<std::size_t>(f);
        for (int i = m - 1; i >= 0; --i) {
            rf.point[2 + i] = h * static_cast<int>(rem % N);
            rem /= N;
        }
        std::vector<double> vals(S);
        for (int s = 0; s < S; ++s) vals[s] = rf.normsq(2.0 * M_PI * s / S);
        for (int s = 0; s < S; ++s) {
            double prev = vals[(s + S - 1) % S], cur = vals[s], next = vals[(s + 1) % S];
            if (cur > prev || cur > next) continue; // not a local minimum
            if (cur > 1e-2) continue;               // coarse gate
            double x = 2.0 * M_PI * s / S;
            bool ok = false;
            for (int it = 0; it < 60; ++it) {
                double g = rf.dnormsq(x);
                double gg = rf.ddnormsq(x);
                if (gg <= 0 || !std::isfinite(gg)) break;
                double step = g / gg;
                x -= step;
                if (std::abs(step) < 1e-14) { ok = true; break; }
            }
            if (!ok) {
                // bisection on F' over the sample cell around the minimum
                double a = 2.0 * M_PI * (s - 1) / S, b = 2.0 * M_PI * (s + 1) / S;
                double ga = rf.dnormsq(a), gb = rf.dnormsq(b);
                if (ga * gb <= 0) {
                    for (int it = 0; it < 80; ++it) {
                        double mid = 0.5 * (a + b);
                        double gm = rf.dnormsq(mid);
                        if (ga * gm <= 0) { b = mid; gb = gm; } else { a = mid; ga = gm; }
                    }
                    x = 0.5 * (a + b);
                    fallbacks[f]++;
                    ok = true;
                }
            }
            if (!ok) continue;
            x = std::fmod(x, 2.0 * M_PI);
            if (x < 0) x += 2.0 * M_PI;
            double res = std::sqrt(rf.normsq(x));
            if (res < tol) {
                bool dup = false;
                for (double r0 : found[f])
                    if (std::abs(r0 - x) < 1e-6 || std::abs(std::abs(r0 - x) - 2.0 * M_PI) < 1e-6)
                        dup = true;
                if (!dup) {
                    found[f].push_back(x);
                    residuals[f] = std::max(residuals[f], res);
                }
            }
        }
    }

    for (std::size_t f = 0; f < fibers; ++f) {
        rep.newton_fallbacks += fallbacks[f];
        rep.max_root_residual = std::max(rep.max_root_residual, residuals[f]);
        for (double x : found[f]) {
            bool dup = false;
            for (double r0 : rep.x_roots)
                if (std::abs(r0 - x) < 1e-6 || std::abs(std::abs(r0 - x) - 2.0 * M_PI) < 1e-6)
                    dup = true;
            if (!dup) rep.x_roots.push_back(x);
        }
    }
    std::sort(rep.x_roots.begin(), rep.x_roots.end());
    rep.empty = rep.x_roots.empty();

    // Fraction of grid nodes at which |W| falls below tol.
    std::size_t total = grid.node_count();
    std::size_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
    for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
        std::vector<double> p = grid.point_of(static_cast<std::size_t>(idx));
        double s = 0;
        for (const Expr& e : w) {
            double v = e.eval(p);
            s += v * v;
        }
        if (std::sqrt(s) < tol) ++hits;
    }
    rep.grid_fraction = static_cast<double>(hits) / static_cast<double>(total);
    return rep;
}

} // namespace qklab
