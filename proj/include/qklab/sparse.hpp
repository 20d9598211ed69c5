#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace qklab {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix. Assembled once from triplets (duplicates
/// summed in a deterministic order), immutable afterwards. The OpenMP
/// matvec `apply` is the production path; `apply_serial` is the reference
/// kept for testing and benchmarking.
class SparseMatrix {
public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> triplets);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> apply_serial(const std::vector<double>& x) const;

    /// A^T (fresh CSR).
    SparseMatrix transpose() const;

    /// A^T A, the Gram operator of this matrix (symmetric PSD).
    SparseMatrix gram() const;

    /// max_i |sum_j A_ij| -- zero for operators with constants in kernel.
    double max_abs_row_sum() const;

    /// max |A_ij - A_ji| over stored entries (0 for exactly symmetric A).
    double symmetry_defect() const;

    /// Gershgorin upper bound on the spectral radius (symmetric case).
    double norm_estimate() const;

    /// Standard triplet text dump: one "row col value" line per entry.
    void export_triplets(std::ostream& os) const;

    const std::vector<std::size_t>& row_ptr() const { return rowPtr_; }
    const std::vector<std::size_t>& col_idx() const { return colIdx_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> rowPtr_;
    std::vector<std::size_t> colIdx_;
    std::vector<double> values_;
};

} // namespace qklab
