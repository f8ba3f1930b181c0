#include "flexkacz/gram.hpp"

#include <algorithm>

#include "flexkacz/errors.hpp"

namespace flexkacz {

GramMatrix GramMatrix::build(const SparseMatrix& A, double dense_threshold) {
    const index_t m = A.rows();
    GramMatrix C;
    C.order_ = m;

    // Gustavson: column j of C is A * alpha_j, gathered through A^T.
    // Build CSR of A^T once for column-of-A access.
    const index_t n = A.cols();
    std::vector<index_t> tptr(static_cast<std::size_t>(n) + 1, 0);
    for (index_t k = 0; k < A.nnz(); ++k) ++tptr[static_cast<std::size_t>(A.col_idx()[k]) + 1];
    for (index_t j = 0; j < n; ++j) tptr[static_cast<std::size_t>(j) + 1] += tptr[j];
    std::vector<index_t> trow(static_cast<std::size_t>(A.nnz()));
    std::vector<double> tval(static_cast<std::size_t>(A.nnz()));
    {
        std::vector<index_t> next(tptr.begin(), tptr.end() - 1);
        for (index_t i = 0; i < m; ++i) {
            auto idx = A.row_indices(i);
            auto val = A.row_values(i);
            for (std::size_t k = 0; k < idx.size(); ++k) {
                index_t p = next[idx[k]]++;
                trow[p] = i;
                tval[p] = val[k];
            }
        }
    }

    // One pass builds sparse columns; switch to dense if the measured
    // density ends up above the threshold.
    std::vector<std::vector<std::pair<index_t, double>>> cols(static_cast<std::size_t>(m));
    DenseVector acc(static_cast<std::size_t>(m), 0.0);
    std::vector<index_t> touched;
    index_t total_nnz = 0;
    for (index_t j = 0; j < m; ++j) {
        touched.clear();
        auto idx = A.row_indices(j);
        auto val = A.row_values(j);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const index_t col = idx[k];
            const double ajk = val[k];
            for (index_t p = tptr[col]; p < tptr[static_cast<std::size_t>(col) + 1]; ++p) {
                const index_t i = trow[p];
                if (acc[i] == 0.0) touched.push_back(i);
                acc[i] += ajk * tval[p];
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& cj = cols[static_cast<std::size_t>(j)];
        cj.reserve(touched.size());
        for (index_t i : touched) {
            if (acc[i] != 0.0) cj.emplace_back(i, acc[i]);
            acc[i] = 0.0;
        }
        total_nnz += static_cast<index_t>(cj.size());
    }

    C.nnz_ = total_nnz;
    C.density_ = m > 0 ? static_cast<double>(total_nnz) / (static_cast<double>(m) * m) : 0.0;
    C.dense_ = C.density_ > dense_threshold;

    if (C.dense_) {
        C.dense_storage_.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
        for (index_t j = 0; j < m; ++j)
            for (const auto& [i, v] : cols[static_cast<std::size_t>(j)])
                C.dense_storage_[static_cast<std::size_t>(j) * m + i] = v;
    } else {
        C.col_ptr_.assign(static_cast<std::size_t>(m) + 1, 0);
        C.row_idx_.reserve(static_cast<std::size_t>(total_nnz));
        C.sp_values_.reserve(static_cast<std::size_t>(total_nnz));
        for (index_t j = 0; j < m; ++j) {
            for (const auto& [i, v] : cols[static_cast<std::size_t>(j)]) {
                C.row_idx_.push_back(i);
                C.sp_values_.push_back(v);
            }
            C.col_ptr_[static_cast<std::size_t>(j) + 1] = static_cast<index_t>(C.row_idx_.size());
        }
    }
    return C;
}

double GramMatrix::entry(index_t i, index_t j) const {
    if (i < 0 || i >= order_ || j < 0 || j >= order_) throw IndexOutOfRange("gram entry out of range");
    if (dense_) return dense_storage_[static_cast<std::size_t>(j) * order_ + i];
    const index_t lo = col_ptr_[j], hi = col_ptr_[static_cast<std::size_t>(j) + 1];
    auto it = std::lower_bound(row_idx_.begin() + lo, row_idx_.begin() + hi, i);
    if (it != row_idx_.begin() + hi && *it == i) return sp_values_[static_cast<std::size_t>(it - row_idx_.begin())];
    return 0.0;
}

void GramMatrix::axpy_column(index_t j, double c, DenseVector& s) const {
    if (dense_) {
        const double* col = dense_storage_.data() + static_cast<std::size_t>(j) * order_;
        for (index_t i = 0; i < order_; ++i) s[i] += c * col[i];
    } else {
        for (index_t p = col_ptr_[j]; p < col_ptr_[static_cast<std::size_t>(j) + 1]; ++p)
            s[row_idx_[p]] += c * sp_values_[p];
    }
}

}  // namespace flexkacz
