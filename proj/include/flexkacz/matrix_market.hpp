#pragma once

#include <string>

#include "flexkacz/sparse_matrix.hpp"

namespace flexkacz {

/// Loader metadata: the file-declared shape vs. the shape after sanitation
/// is reported by the CLI, so the raw zero-row count is kept here.
struct MatrixMarketInfo {
    index_t nrows = 0;
    index_t ncols = 0;
    index_t entries_declared = 0;
    index_t zero_rows = 0;
    bool symmetric = false;
    bool dense_array = false;
};

/// Reads "matrix coordinate real general|symmetric" or "matrix array real
/// general". Duplicates summed, explicit zeros dropped, symmetric storage
/// expanded. Throws ParseError / UnsupportedFormat / IndexOutOfRange.
SparseMatrix load_matrix_market(const std::string& path, MatrixMarketInfo* info = nullptr);

/// Writes coordinate real general with 17 significant digits (round trips
/// bit-exactly through load_matrix_market). `header_comments` lines are
/// emitted as '%' comments after the banner.
void write_matrix_market(const std::string& path, const SparseMatrix& A,
                         const std::vector<std::string>& header_comments = {});

}  // namespace flexkacz
