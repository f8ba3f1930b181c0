#pragma once

#include "flexkacz/sparse_matrix.hpp"

namespace flexkacz {

/// C = A A^T with per-column access for the recursive residual update.
/// Stored dense (column-major, order m) when the measured density exceeds
/// `dense_threshold`, otherwise as sparse columns. C is symmetric, so
/// columns and rows coincide.
class GramMatrix {
  public:
    static constexpr double kDefaultDenseThreshold = 0.25;

    static GramMatrix build(const SparseMatrix& A, double dense_threshold = kDefaultDenseThreshold);

    index_t order() const { return order_; }
    double density() const { return density_; }
    bool is_dense() const { return dense_; }
    index_t nnz() const { return nnz_; }

    double entry(index_t i, index_t j) const;
    double diag(index_t i) const { return entry(i, i); }

    /// s += c * C_(j)
    void axpy_column(index_t j, double c, DenseVector& s) const;

  private:
    index_t order_ = 0;
    bool dense_ = false;
    double density_ = 0.0;
    index_t nnz_ = 0;
    DenseVector dense_storage_;          // column-major, order_ x order_
    std::vector<index_t> col_ptr_{0};    // sparse columns
    std::vector<index_t> row_idx_;
    std::vector<double> sp_values_;
};

}  // namespace flexkacz
