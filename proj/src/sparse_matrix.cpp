#include "flexkacz/sparse_matrix.hpp"

#include <algorithm>

#include "flexkacz/errors.hpp"

namespace flexkacz {

SparseMatrix SparseMatrix::from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> entries) {
    if (nrows < 0 || ncols < 0) throw DimensionMismatch("negative matrix dimensions");
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
            throw IndexOutOfRange("triplet index (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                  ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix A;
    A.nrows_ = nrows;
    A.ncols_ = ncols;
    A.row_ptr_.assign(static_cast<std::size_t>(nrows) + 1, 0);
    A.col_idx_.reserve(entries.size());
    A.values_.reserve(entries.size());

    std::size_t k = 0;
    for (index_t i = 0; i < nrows; ++i) {
        while (k < entries.size() && entries[k].row == i) {
            index_t col = entries[k].col;
            double v = entries[k].value;
            ++k;
            while (k < entries.size() && entries[k].row == i && entries[k].col == col) {
                v += entries[k].value;  // duplicates are summed
                ++k;
            }
            if (v != 0.0) {
                A.col_idx_.push_back(col);
                A.values_.push_back(v);
            }
        }
        A.row_ptr_[static_cast<std::size_t>(i) + 1] = static_cast<index_t>(A.values_.size());
    }

    A.row_norms_sq_.assign(static_cast<std::size_t>(nrows), 0.0);
    for (index_t i = 0; i < nrows; ++i) {
        double acc = 0.0;
        for (index_t p = A.row_ptr_[i]; p < A.row_ptr_[i + 1]; ++p) acc += A.values_[p] * A.values_[p];
        A.row_norms_sq_[i] = acc;
        A.frob_sq_ += acc;
    }
    return A;
}

DenseVector SparseMatrix::multiply(const DenseVector& x) const {
    if (static_cast<index_t>(x.size()) != ncols_)
        throw DimensionMismatch("matvec: x has length " + std::to_string(x.size()) + ", expected " +
                                std::to_string(ncols_));
    DenseVector y(static_cast<std::size_t>(nrows_), 0.0);
    for (index_t i = 0; i < nrows_; ++i) {
        double acc = 0.0;
        for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
        y[i] = acc;
    }
    return y;
}

DenseVector SparseMatrix::multiply_transpose(const DenseVector& y) const {
    if (static_cast<index_t>(y.size()) != nrows_)
        throw DimensionMismatch("matvec_transpose: y has length " + std::to_string(y.size()) + ", expected " +
                                std::to_string(nrows_));
    DenseVector z(static_cast<std::size_t>(ncols_), 0.0);
    for (index_t i = 0; i < nrows_; ++i)
        for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) z[col_idx_[k]] += values_[k] * y[i];
    return z;
}

index_t SparseMatrix::count_zero_rows() const {
    index_t count = 0;
    for (index_t i = 0; i < nrows_; ++i)
        if (row_ptr_[i] == row_ptr_[i + 1]) ++count;
    return count;
}

std::pair<SparseMatrix, std::vector<index_t>> drop_zero_rows(const SparseMatrix& A) {
    std::vector<index_t> kept;
    kept.reserve(static_cast<std::size_t>(A.rows()));
    for (index_t i = 0; i < A.rows(); ++i)
        if (!A.row_indices(i).empty()) kept.push_back(i);
    if (kept.empty()) throw AllRowsZero("matrix has no nonzero rows");

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(A.nnz()));
    for (index_t r = 0; r < static_cast<index_t>(kept.size()); ++r) {
        const index_t i = kept[static_cast<std::size_t>(r)];
        auto idx = A.row_indices(i);
        auto val = A.row_values(i);
        for (std::size_t k = 0; k < idx.size(); ++k) entries.push_back({r, idx[k], val[k]});
    }
    return {SparseMatrix::from_triplets(static_cast<index_t>(kept.size()), A.cols(), std::move(entries)),
            std::move(kept)};
}

}  // namespace flexkacz
