#include "qklab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace qklab {

PeriodicGrid::PeriodicGrid(int dimension, int nodesPerAxis)
    : n_(dimension), N_(nodesPerAxis) {
    if (n_ < 1) throw std::invalid_argument("PeriodicGrid: dimension < 1");
    if (N_ < 4 || N_ % 2 != 0)
        throw std::invalid_argument("PeriodicGrid: nodes per axis must be even and >= 4");
    h_ = 2.0 * M_PI / N_;
    count_ = 1;
    stride_.resize(n_);
    // row-major: last axis fastest
    for (int i = n_ - 1; i >= 0; --i) {
        stride_[i] = count_;
        count_ *= static_cast<std::size_t>(N_);
    }
}

double PeriodicGrid::cell_volume() const {
    return std::pow(h_, n_);
}

std::size_t PeriodicGrid::index(const std::vector<int>& coords) const {
    if (static_cast<int>(coords.size()) != n_)
        throw std::invalid_argument("PeriodicGrid::index: wrong coordinate count");
    std::size_t idx = 0;
    for (int i = 0; i < n_; ++i) {
        int c = coords[i] % N_;
        if (c < 0) c += N_;
        idx += stride_[i] * static_cast<std::size_t>(c);
    }
    return idx;
}

std::vector<int> PeriodicGrid::coords_of(std::size_t idx) const {
    std::vector<int> c(n_);
    for (int i = 0; i < n_; ++i) {
        c[i] = static_cast<int>((idx / stride_[i]) % static_cast<std::size_t>(N_));
    }
    return c;
}

std::vector<double> PeriodicGrid::point_of(std::size_t idx) const {
    std::vector<int> c = coords_of(idx);
    std::vector<double> p(n_);
    for (int i = 0; i < n_; ++i) p[i] = h_ * c[i];
    return p;
}

std::size_t PeriodicGrid::neighbor(std::size_t idx, int axis, int step) const {
    int c = static_cast<int>((idx / stride_[axis]) % static_cast<std::size_t>(N_));
    int c2 = c + step;
    if (c2 < 0) c2 += N_;
    if (c2 >= N_) c2 -= N_;
    return idx - stride_[axis] * static_cast<std::size_t>(c)
               + stride_[axis] * static_cast<std::size_t>(c2);
}

} // namespace qklab
