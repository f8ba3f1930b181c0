#pragma once

#include <span>
#include <utility>
#include <vector>

#include "flexkacz/vec.hpp"

namespace flexkacz {

/// One (row, col, value) entry used during assembly.
struct Triplet {
    index_t row;
    index_t col;
    double value;
};

/// Immutable CSR matrix with cached squared row norms.
///
/// Construction sorts column indices within each row, sums duplicate
/// coordinates and drops entries that sum to exactly zero.
class SparseMatrix {
  public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> entries);

    index_t rows() const { return nrows_; }
    index_t cols() const { return ncols_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }

    std::span<const index_t> row_indices(index_t i) const {
        return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
    }
    std::span<const double> row_values(index_t i) const {
        return {values_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
    }

    const std::vector<index_t>& row_ptr() const { return row_ptr_; }
    const std::vector<index_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    double row_norm_sq(index_t i) const { return row_norms_sq_[i]; }
    const std::vector<double>& row_norms_sq() const { return row_norms_sq_; }
    double frobenius_sq() const { return frob_sq_; }

    double density() const {
        return nrows_ && ncols_ ? static_cast<double>(nnz()) / (static_cast<double>(nrows_) * ncols_) : 0.0;
    }

    /// alpha_i^T x
    double row_dot(index_t i, const DenseVector& x) const {
        double acc = 0.0;
        for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
        return acc;
    }

    /// z += c * alpha_i
    void add_scaled_row(index_t i, double c, DenseVector& z) const {
        for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) z[col_idx_[k]] += c * values_[k];
    }

    /// y = A x
    DenseVector multiply(const DenseVector& x) const;
    /// y = A^T x
    DenseVector multiply_transpose(const DenseVector& y) const;

    index_t count_zero_rows() const;

  private:
    index_t nrows_ = 0;
    index_t ncols_ = 0;
    std::vector<index_t> row_ptr_{0};
    std::vector<index_t> col_idx_;
    std::vector<double> values_;
    std::vector<double> row_norms_sq_;
    double frob_sq_ = 0.0;
};

/// Remove empty rows; second element maps result rows to original row indices.
/// Throws AllRowsZero when nothing is left.
std::pair<SparseMatrix, std::vector<index_t>> drop_zero_rows(const SparseMatrix& A);

}  // namespace flexkacz
