#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qklab/construction.hpp"
#include "qklab/grid.hpp"
#include "qklab/vectorfield.hpp"

namespace qklab {

/// Binary bracketing word over generator indices. Leaves are generators,
/// internal nodes are brackets of their children; length = leaf count.
class BracketWord {
public:
    static BracketWord leaf(int generator);
    static BracketWord bracket(const BracketWord& left, const BracketWord& right);

    int length() const;
    bool is_leaf() const;
    int generator() const;   // leaf only
    BracketWord left() const; // bracket only
    BracketWord right() const;

    std::string str(const std::vector<std::string>& names = {}) const;

private:
    struct Node;
    explicit BracketWord(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct GeneratedBracket {
    BracketWord word;
    VectorField field;
};

/// Enumerates iterated commutators up to `maxDepth` leaves: all left-normed
/// words over the generators plus, for two generators (V, W), the adjoint
/// families D_V^a(W) and D_V^c D_W D_V^b(W). Fields are computed
/// symbolically; duplicates by structural equality are removed. Exceeding
/// `maxFields` distinct fields throws (never silently truncates).
std::vector<GeneratedBracket> generate_brackets(const std::vector<VectorField>& generators,
                                                int maxDepth, int maxFields = 512);

/// Per-sample-point rank certificate for the span of a family of fields.
struct RankReport {
    int points_sampled = 0;
    int min_rank = 0;
    int depth_used = 0;
    double sv_threshold = 0.0;
    std::vector<int> ranks; // per sample point
    struct Deficient {
        std::vector<double> point;
        int rank;
    };
    std::vector<Deficient> deficient_points; // rank < ambient dimension

    std::string to_json() const;
};

/// Numerical rank of span{fields} at each sample point: the count of
/// singular values above tol * sigma_max. Parallel over samples.
RankReport rank_report(const std::vector<VectorField>& fields,
                       const std::vector<std::vector<double>>& samples,
                       double tol, int depthUsed = 0);

/// Low-discrepancy sample set on T^n: a rank-1 lattice plus all nodes of
/// the grid, plus extra points on the planes x = xr for each xr given.
std::vector<std::vector<double>> hormander_samples(const PeriodicGrid& grid,
                                                   int latticeCount,
                                                   const std::vector<double>& singularX = {});

/// Zero locus of W, located per (y,z) fiber by dense x-sampling plus
/// Newton refinement on |W|^2 (bisection fallback on the derivative).
struct SingularReport {
    int generic_dim = 2;            // dim span(V,W) almost everywhere
    bool empty = true;
    std::vector<double> x_roots;    // clustered across fibers
    double grid_fraction = 0.0;     // fraction of grid nodes with |W| < tol
    int fibers_checked = 0;
    int newton_fallbacks = 0;
    double max_root_residual = 0.0; // max |W| over accepted roots
};

SingularReport find_singular_set(const ConstructionSpec& spec,
                                 const PeriodicGrid& grid, double tol);

} // namespace qklab
