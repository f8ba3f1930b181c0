#include "flexkacz/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "flexkacz/errors.hpp"

namespace flexkacz {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

SparseMatrix load_matrix_market(const std::string& path, MatrixMarketInfo* info) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket" || lower(object) != "matrix")
        throw ParseError(path + ": malformed MatrixMarket banner: " + line);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "integer")
        throw UnsupportedFormat(path + ": unsupported field '" + field + "' (real only)");
    const bool coordinate = format == "coordinate";
    if (!coordinate && format != "array")
        throw UnsupportedFormat(path + ": unsupported format '" + format + "'");
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw UnsupportedFormat(path + ": unsupported symmetry '" + symmetry + "'");
    if (!coordinate && symmetric) throw UnsupportedFormat(path + ": symmetric array storage not supported");

    // skip comments and blank lines
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sizes(line);
    index_t nrows = 0, ncols = 0, nentries = 0;
    if (coordinate) {
        if (!(sizes >> nrows >> ncols >> nentries)) throw ParseError(path + ": malformed size line: " + line);
    } else {
        if (!(sizes >> nrows >> ncols)) throw ParseError(path + ": malformed size line: " + line);
        nentries = nrows * ncols;
    }
    if (nrows < 0 || ncols < 0 || nentries < 0) throw ParseError(path + ": negative sizes");

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nentries : nentries));
    if (coordinate) {
        for (index_t k = 0; k < nentries; ++k) {
            index_t i, j;
            double v;
            if (!(in >> i >> j >> v)) throw ParseError(path + ": truncated or malformed entry " + std::to_string(k + 1));
            if (i < 1 || i > nrows || j < 1 || j > ncols)
                throw IndexOutOfRange(path + ": entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
            entries.push_back({i - 1, j - 1, v});
            if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
        }
    } else {
        // array storage is column-major
        for (index_t j = 0; j < ncols; ++j)
            for (index_t i = 0; i < nrows; ++i) {
                double v;
                if (!(in >> v)) throw ParseError(path + ": truncated array data");
                if (v != 0.0) entries.push_back({i, j, v});
            }
    }

    SparseMatrix A = SparseMatrix::from_triplets(nrows, ncols, std::move(entries));
    if (info) {
        info->nrows = nrows;
        info->ncols = ncols;
        info->entries_declared = nentries;
        info->zero_rows = A.count_zero_rows();
        info->symmetric = symmetric;
        info->dense_array = !coordinate;
    }
    return A;
}

void write_matrix_market(const std::string& path, const SparseMatrix& A,
                         const std::vector<std::string>& header_comments) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    for (const auto& c : header_comments) out << "% " << c << "\n";
    out << A.rows() << " " << A.cols() << " " << A.nnz() << "\n";
    out.precision(17);
    for (index_t i = 0; i < A.rows(); ++i) {
        auto idx = A.row_indices(i);
        auto val = A.row_values(i);
        for (std::size_t k = 0; k < idx.size(); ++k)
            out << (i + 1) << " " << (idx[k] + 1) << " " << val[k] << "\n";
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

}  // namespace flexkacz
