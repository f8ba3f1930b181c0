#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "flexkacz/errors.hpp"
#include "flexkacz/gram.hpp"
#include "flexkacz/matrix_market.hpp"
#include "flexkacz/sparse_matrix.hpp"
#include "oracles.hpp"

using namespace flexkacz;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("./") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("from_triplets sums duplicates and drops zeros") {
    auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 1, 3.0}, {1, 0, 5.0}, {1, 0, -5.0}});
    CHECK(A.nnz() == 2);
    CHECK(A.row_values(0)[0] == 3.0);
    CHECK(A.row_indices(1).size() == 1);
    CHECK(A.row_indices(1)[0] == 1);
}

TEST_CASE("from_triplets rejects out-of-range indices") {
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), IndexOutOfRange);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, -1, 1.0}}), IndexOutOfRange);
}

TEST_CASE("row norms match Frobenius norm") {
    auto A = oracles::random_sparse(23, 11, 0.3, 42);
    double direct = 0.0;
    for (double v : A.values()) direct += v * v;
    double via_rows = 0.0;
    for (index_t i = 0; i < A.rows(); ++i) via_rows += A.row_norm_sq(i);
    CHECK(via_rows == doctest::Approx(direct).epsilon(1e-14));
    CHECK(A.frobenius_sq() == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("matvec identity and hand case") {
    auto I3 = SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
    CHECK(I3.multiply({1, 2, 3}) == DenseVector{1, 2, 3});
    CHECK(I3.multiply_transpose({1, 2, 3}) == DenseVector{1, 2, 3});

    auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 2}, {1, 0, 3}, {1, 1, 4}});
    CHECK(A.multiply({1, 1}) == DenseVector{3, 7});
    CHECK(A.multiply_transpose({1, 1}) == DenseVector{4, 6});
    CHECK_THROWS_AS(A.multiply({1, 2, 3}), DimensionMismatch);
    CHECK_THROWS_AS(A.multiply_transpose({1, 2, 3}), DimensionMismatch);
}

TEST_CASE("adjoint identity <Ax,y> = <x,A^T y> on random instances") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto A = oracles::random_sparse(20, 7, 0.25, 100 + static_cast<std::uint64_t>(trial));
        auto x = oracles::random_vector(7, rng);
        auto y = oracles::random_vector(20, rng);
        const double lhs = dot(A.multiply(x), y);
        const double rhs = dot(x, A.multiply_transpose(y));
        const double scale = std::max(std::fabs(lhs), 1.0);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("drop_zero_rows") {
    auto A = SparseMatrix::from_triplets(3, 2, {{0, 0, 1}, {2, 1, 2}});
    auto [B, kept] = drop_zero_rows(A);
    CHECK(B.rows() == 2);
    CHECK(B.cols() == 2);
    CHECK(kept == std::vector<index_t>{0, 2});
    for (index_t i = 0; i < B.rows(); ++i) CHECK(B.row_norm_sq(i) > 0.0);

    auto full = oracles::random_sparse(5, 3, 0.5, 1);
    auto [same, kept2] = drop_zero_rows(full);
    CHECK(same.rows() == full.rows());
    CHECK(kept2 == std::vector<index_t>{0, 1, 2, 3, 4});

    auto zero = SparseMatrix::from_triplets(3, 3, {});
    CHECK_THROWS_AS(drop_zero_rows(zero), AllRowsZero);
}

TEST_CASE("matrix market identity coordinate file") {
    auto path = write_temp("mm_id.mtx",
                           "%%MatrixMarket matrix coordinate real general\n"
                           "2 2 2\n1 1 1.0\n2 2 1.0\n");
    auto A = load_matrix_market(path);
    CHECK(A.rows() == 2);
    CHECK(A.cols() == 2);
    CHECK(A.nnz() == 2);
    CHECK(A.row_values(0)[0] == 1.0);
    CHECK(A.row_values(1)[0] == 1.0);
    std::remove(path.c_str());
}

TEST_CASE("matrix market out-of-range entry") {
    auto path = write_temp("mm_oob.mtx",
                           "%%MatrixMarket matrix coordinate real general\n"
                           "2 2 1\n3 1 0.0\n");
    CHECK_THROWS_AS(load_matrix_market(path), IndexOutOfRange);
    std::remove(path.c_str());
}

TEST_CASE("matrix market rejects malformed and unsupported files") {
    auto bad = write_temp("mm_bad.mtx", "not a banner\n1 1 1\n");
    CHECK_THROWS_AS(load_matrix_market(bad), ParseError);
    std::remove(bad.c_str());

    auto cplx = write_temp("mm_cplx.mtx", "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 2.0\n");
    CHECK_THROWS_AS(load_matrix_market(cplx), UnsupportedFormat);
    std::remove(cplx.c_str());

    auto pat = write_temp("mm_pat.mtx", "%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n");
    CHECK_THROWS_AS(load_matrix_market(pat), UnsupportedFormat);
    std::remove(pat.c_str());
}

TEST_CASE("matrix market symmetric expansion and duplicate summing") {
    auto path = write_temp("mm_sym.mtx",
                           "%%MatrixMarket matrix coordinate real symmetric\n"
                           "% comment line\n"
                           "3 3 3\n1 1 2.0\n2 1 -1.0\n3 3 4.0\n");
    auto A = load_matrix_market(path);
    CHECK(A.nnz() == 4);
    auto D = oracles::DenseMatrix::from_sparse(A);
    CHECK(D.at(0, 1) == -1.0);
    CHECK(D.at(1, 0) == -1.0);
    std::remove(path.c_str());
}

TEST_CASE("matrix market array format") {
    auto path = write_temp("mm_arr.mtx",
                           "%%MatrixMarket matrix array real general\n"
                           "2 2\n1.0\n3.0\n0.0\n4.0\n");
    auto A = load_matrix_market(path);
    auto D = oracles::DenseMatrix::from_sparse(A);
    CHECK(D.at(0, 0) == 1.0);
    CHECK(D.at(1, 0) == 3.0);
    CHECK(D.at(0, 1) == 0.0);
    CHECK(D.at(1, 1) == 4.0);
    std::remove(path.c_str());
}

TEST_CASE("matrix market round trip is bit exact") {
    auto A = oracles::random_sparse(17, 9, 0.3, 99);
    write_matrix_market("./mm_rt.mtx", A, {"roundtrip test"});
    MatrixMarketInfo info;
    auto B = load_matrix_market("./mm_rt.mtx", &info);
    REQUIRE(B.nnz() == A.nnz());
    CHECK(info.nrows == 17);
    for (index_t k = 0; k < A.nnz(); ++k) {
        CHECK(A.values()[k] == B.values()[k]);
        CHECK(A.col_idx()[k] == B.col_idx()[k]);
    }
    std::remove("./mm_rt.mtx");
}

TEST_CASE("gram of identity and hand case") {
    auto I3 = SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
    auto C = GramMatrix::build(I3);
    CHECK(C.order() == 3);
    CHECK(C.density() == doctest::Approx(1.0 / 3.0));
    CHECK(C.entry(0, 0) == 1.0);
    CHECK(C.entry(0, 1) == 0.0);

    auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, -1}});
    auto C2 = GramMatrix::build(A);
    CHECK(C2.entry(0, 0) == doctest::Approx(2.0));
    CHECK(C2.entry(1, 1) == doctest::Approx(2.0));
    CHECK(C2.entry(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("gram is symmetric with row-norm diagonal; entries match row dot products") {
    auto A = oracles::random_sparse(50, 30, 0.2, 3);
    for (double thr : {0.0, 1.0}) {  // force dense and sparse storage
        auto C = GramMatrix::build(A, thr);
        Rng rng(11);
        for (int t = 0; t < 50; ++t) {
            const index_t i = static_cast<index_t>(rng.next_u64() % 50);
            const index_t j = static_cast<index_t>(rng.next_u64() % 50);
            CHECK(C.entry(i, j) == doctest::Approx(C.entry(j, i)).epsilon(1e-12));
            double dotij = 0.0;
            auto ii = A.row_indices(i);
            auto iv = A.row_values(i);
            for (std::size_t k = 0; k < ii.size(); ++k) {
                auto ji = A.row_indices(j);
                auto jv = A.row_values(j);
                for (std::size_t l = 0; l < ji.size(); ++l)
                    if (ji[l] == ii[k]) dotij += iv[k] * jv[l];
            }
            CHECK(C.entry(i, j) == doctest::Approx(dotij).epsilon(1e-12));
        }
        for (index_t i = 0; i < 50; ++i)
            CHECK(C.diag(i) == doctest::Approx(A.row_norm_sq(i)).epsilon(1e-12));
    }
}

TEST_CASE("gram axpy_column matches entry access") {
    auto A = oracles::random_sparse(20, 8, 0.3, 5);
    auto C = GramMatrix::build(A, 1.0);  // sparse storage
    DenseVector s(20, 0.0);
    C.axpy_column(4, 2.0, s);
    for (index_t i = 0; i < 20; ++i) CHECK(s[i] == doctest::Approx(2.0 * C.entry(i, 4)));
}
