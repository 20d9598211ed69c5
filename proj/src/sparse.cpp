#include "qklab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qklab {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> ts) {
    for (const Triplet& t : ts)
        if (t.row >= rows || t.col >= cols)
            throw std::invalid_argument("SparseMatrix: triplet out of range");
    // Value participates in the sort key so duplicate accumulation order
    // does not depend on triplet production order.
    std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
        if (a.row != b.row) return a.row < b.row;
        if (a.col != b.col) return a.col < b.col;
        return a.value < b.value;
    });

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.rowPtr_.assign(rows + 1, 0);
    std::size_t i = 0;
    while (i < ts.size()) {
        double v = ts[i].value;
        std::size_t j = i + 1;
        while (j < ts.size() && ts[j].row == ts[i].row && ts[j].col == ts[i].col) {
            v += ts[j].value;
            ++j;
        }
        if (v != 0.0) {
            m.colIdx_.push_back(ts[i].col);
            m.values_.push_back(v);
            m.rowPtr_[ts[i].row + 1]++;
        }
        i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) m.rowPtr_[r + 1] += m.rowPtr_[r];
    return m;
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("SparseMatrix::apply: size mismatch");
    std::vector<double> y(rows_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows_); ++r) {
        double s = 0.0;
        for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k)
            s += values_[k] * x[colIdx_[k]];
        y[r] = s;
    }
    return y;
}

std::vector<double> SparseMatrix::apply_serial(const std::vector<double>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("SparseMatrix::apply_serial: size mismatch");
    std::vector<double> y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k)
            s += values_[k] * x[colIdx_[k]];
        y[r] = s;
    }
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<Triplet> ts;
    ts.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k)
            ts.push_back({colIdx_[k], r, values_[k]});
    return from_triplets(cols_, rows_, std::move(ts));
}

SparseMatrix SparseMatrix::gram() const {
    std::vector<Triplet> ts;
    ts.reserve(nnz() * 8);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t a = rowPtr_[r]; a < rowPtr_[r + 1]; ++a)
            for (std::size_t b = rowPtr_[r]; b < rowPtr_[r + 1]; ++b)
                ts.push_back({colIdx_[a], colIdx_[b], values_[a] * values_[b]});
    }
    return from_triplets(cols_, cols_, std::move(ts));
}

double SparseMatrix::max_abs_row_sum() const {
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) s += values_[k];
        m = std::max(m, std::abs(s));
    }
    return m;
}

double SparseMatrix::symmetry_defect() const {
    SparseMatrix t = transpose();
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        std::size_t ka = rowPtr_[r], kb = t.rowPtr_[r];
        std::size_t ea = rowPtr_[r + 1], eb = t.rowPtr_[r + 1];
        while (ka < ea || kb < eb) {
            std::size_t ca = ka < ea ? colIdx_[ka] : cols_;
            std::size_t cb = kb < eb ? t.colIdx_[kb] : cols_;
            if (ca == cb) {
                m = std::max(m, std::abs(values_[ka] - t.values_[kb]));
                ++ka; ++kb;
            } else if (ca < cb) {
                m = std::max(m, std::abs(values_[ka]));
                ++ka;
            } else {
                m = std::max(m, std::abs(t.values_[kb]));
                ++kb;
            }
        }
    }
    return m;
}

double SparseMatrix::norm_estimate() const {
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) s += std::abs(values_[k]);
        m = std::max(m, s);
    }
    return m;
}

void SparseMatrix::export_triplets(std::ostream& os) const {
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k)
            os << r << " " << colIdx_[k] << " " << values_[k] << "\n";
}

} // namespace qklab
