#pragma once

#include <cstddef>
#include <vector>

namespace qklab {

/// Uniform periodic grid on T^n: N nodes per axis, spacing h = 2*pi/N,
/// row-major flat indexing with wraparound neighbors.
class PeriodicGrid {
public:
    PeriodicGrid(int dimension, int nodesPerAxis);

    int dimension() const { return n_; }
    int nodes_per_axis() const { return N_; }
    double spacing() const { return h_; }
    std::size_t node_count() const { return count_; }
    double cell_volume() const; // h^n

    std::size_t index(const std::vector<int>& coords) const;
    std::vector<int> coords_of(std::size_t idx) const;
    std::vector<double> point_of(std::size_t idx) const;

    /// Flat index of the node one step along `axis` (step = +1 or -1),
    /// wrapping around the torus.
    std::size_t neighbor(std::size_t idx, int axis, int step) const;

private:
    int n_;
    int N_;
    double h_;
    std::size_t count_;
    std::vector<std::size_t> stride_;
};

} // namespace qklab
