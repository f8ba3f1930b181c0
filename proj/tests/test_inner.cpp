#include "doctest.h"

#include <cmath>

#include "flexkacz/errors.hpp"
#include "flexkacz/inner.hpp"
#include "oracles.hpp"

using namespace flexkacz;

namespace {

InnerState make_state(const SparseMatrix& A, const DenseVector& v) {
    InnerState st;
    st.z.assign(static_cast<std::size_t>(A.cols()), 0.0);
    st.s = v;
    return st;
}

DenseVector true_residual(const SparseMatrix& A, const DenseVector& v, const DenseVector& z) {
    DenseVector s = v;
    DenseVector az = A.multiply(z);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] -= az[i];
    return s;
}

}  // namespace

TEST_CASE("omega outside (0,2) is rejected") {
    CHECK_THROWS_AS((InnerMethod{InnerTag::RK, 2.5}.validate()), DomainError);
    CHECK_THROWS_AS((InnerMethod{InnerTag::RK, 0.0}.validate()), DomainError);
    CHECK_NOTHROW((InnerMethod{InnerTag::RK, 1.9}.validate()));
}

TEST_CASE("kaczmarz_project exact and relaxed step") {
    auto A = SparseMatrix::from_triplets(1, 2, {{0, 0, 1.0}});
    auto st = make_state(A, {2.0});
    kaczmarz_project(st, 0, A, 1.0);
    CHECK(st.z == DenseVector{2.0, 0.0});
    CHECK(true_residual(A, {2.0}, st.z)[0] == doctest::Approx(0.0));

    auto st2 = make_state(A, {2.0});
    kaczmarz_project(st2, 0, A, 0.5);
    CHECK(st2.z == DenseVector{1.0, 0.0});
    CHECK(true_residual(A, {2.0}, st2.z)[0] == doctest::Approx(1.0));  // (1-0.5)*2
}

TEST_CASE("kaczmarz_project hand iteration rows 0,1,0") {
    auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
    DenseVector v{1.0, 2.0};
    auto st = make_state(A, v);
    // z = 0 -> (1,0) -> (1.5,0.5) -> (1,0.5)
    const DenseVector expected[] = {{1.0, 0.0}, {1.5, 0.5}, {1.0, 0.5}};
    int step = 0;
    for (index_t i : {0, 1, 0}) {
        st.s = true_residual(A, v, st.z);
        kaczmarz_project(st, i, A, 1.0);
        CHECK(st.z[0] == doctest::Approx(expected[step][0]));
        CHECK(st.z[1] == doctest::Approx(expected[step][1]));
        ++step;
    }
    CHECK(st.projections == 3);
}

TEST_CASE("kaczmarz_project refuses zero rows") {
    auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}});
    auto st = make_state(A, {1.0, 1.0});
    CHECK_THROWS_AS(kaczmarz_project(st, 1, A, 1.0), ZeroRow);
}

TEST_CASE("projection identity: residual component scales by 1-omega") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        auto A = oracles::random_sparse(12, 8, 0.4, 300 + static_cast<std::uint64_t>(trial));
        auto v = oracles::random_vector(12, rng);
        const double omega = 0.1 + 1.8 * rng.next_double();
        auto st = make_state(A, v);
        for (int p = 0; p < 20; ++p) {
            st.s = true_residual(A, v, st.z);
            const index_t i = static_cast<index_t>(rng.next_u64() % 12);
            const double before = st.s[i];
            kaczmarz_project(st, i, A, omega);
            const double after = v[i] - A.row_dot(i, st.z);
            CHECK(std::fabs(after - (1.0 - omega) * before) <= 1e-13 * std::max(1.0, std::fabs(before)));
        }
    }
}

TEST_CASE("residual_update identity and C=2I cases") {
    auto I2 = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
    auto C = GramMatrix::build(I2);
    InnerState st;
    st.s = {3.0, 4.0};
    residual_update(st, 0, C, 1.0);
    CHECK(st.s[0] == doctest::Approx(0.0));
    CHECK(st.s[1] == doctest::Approx(4.0));

    auto A = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, -1.0}});
    auto C2 = GramMatrix::build(A);
    InnerState st2;
    st2.s = {2.0, 6.0};
    residual_update(st2, 1, C2, 1.0);
    CHECK(st2.s[0] == doctest::Approx(2.0));
    CHECK(st2.s[1] == doctest::Approx(0.0));
}

TEST_CASE("recursive residual tracks v - Az over 200 relaxed projections") {
    auto A = oracles::random_sparse(30, 10, 0.4, 77);
    auto C = GramMatrix::build(A, 0.0);
    Rng rng(5);
    auto v = oracles::random_vector(30, rng);
    auto st = make_state(A, v);
    const double omega = 1.3;
    for (int p = 0; p < 200; ++p) {
        const index_t i = static_cast<index_t>(rng.next_u64() % 30);
        kaczmarz_project(st, i, A, omega);
        residual_update(st, i, C, omega);
    }
    auto exact = true_residual(A, v, st.z);
    double dev = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) dev = std::max(dev, std::fabs(exact[i] - st.s[i]));
    CHECK(dev <= 1e-10);
}

TEST_CASE("select_gk argmax with lowest-index ties") {
    CHECK(select_gk({1.0, -3.0, 2.0}) == 1);
    CHECK(select_gk({2.0, -2.0}) == 0);
    CHECK_THROWS_AS(select_gk({0.0, 0.0}), ZeroResidual);
}

TEST_CASE("select_rk single row and weighted distribution") {
    auto single = SparseMatrix::from_triplets(1, 1, {{0, 0, 2.0}});
    RowSampler sampler1(single);
    Rng rng(1);
    for (int t = 0; t < 10; ++t) CHECK(select_rk(rng, sampler1) == 0);

    // rows with squared norms 1 and 3: P(row 1) = 0.75
    auto two = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}, {1, 1, std::sqrt(2.0)}});
    RowSampler sampler2(two);
    Rng rng2(2);
    const int draws = 100000;
    int count1 = 0;
    for (int t = 0; t < draws; ++t)
        if (select_rk(rng2, sampler2) == 1) ++count1;
    const double phat = static_cast<double>(count1) / draws;
    const double sigma = std::sqrt(0.75 * 0.25 / draws);
    CHECK(std::fabs(phat - 0.75) <= 3.0 * sigma);
}

TEST_CASE("select_rk uniform when all row norms equal") {
    auto A = SparseMatrix::from_triplets(4, 4, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}, {3, 3, 1.0}});
    RowSampler sampler(A);
    Rng rng(3);
    const int draws = 100000;
    int counts[4] = {0, 0, 0, 0};
    for (int t = 0; t < draws; ++t) ++counts[select_rk(rng, sampler)];
    const double sigma = std::sqrt(0.25 * 0.75 * draws);
    for (int i = 0; i < 4; ++i) CHECK(std::fabs(counts[i] - draws / 4.0) <= 3.0 * sigma);
}

TEST_CASE("select_grk hand case and single row") {
    auto single = SparseMatrix::from_triplets(1, 2, {{0, 0, 1.0}});
    InnerState st1;
    st1.s = {0.5};
    Rng rng(4);
    CHECK(select_grk(rng, st1, single) == 0);

    // A = I2, s = (1,0): eps = (1/1 + 1/2)/2 = 0.75, U = {0}
    auto I2 = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
    InnerState st2;
    st2.s = {1.0, 0.0};
    for (int t = 0; t < 20; ++t) CHECK(select_grk(rng, st2, I2) == 0);

    InnerState stz;
    stz.s = {0.0, 0.0};
    CHECK_THROWS_AS(select_grk(rng, stz, I2), ZeroResidual);
}

TEST_CASE("grk threshold set always contains the weighted argmax row") {
    Rng rng(8);
    int steps = 0;
    for (int inst = 0; inst < 20 && steps < 10000; ++inst) {
        auto A = oracles::random_sparse(20, 5, 0.4, 900 + static_cast<std::uint64_t>(inst));
        auto C = GramMatrix::build(A, 0.0);
        auto v = oracles::random_vector(20, rng);
        auto st = make_state(A, v);
        for (int p = 0; p < 500 && steps < 10000; ++p, ++steps) {
            const double snorm2 = norm2_sq(st.s);
            if (snorm2 < 1e-28) break;
            index_t argmax = 0;
            double best = -1.0;
            for (index_t i = 0; i < 20; ++i) {
                const double r = st.s[i] * st.s[i] / A.row_norm_sq(i);
                if (r > best) {
                    best = r;
                    argmax = i;
                }
            }
            const double eps = 0.5 * (best / snorm2 + 1.0 / A.frobenius_sq());
            CHECK(st.s[argmax] * st.s[argmax] >= eps * snorm2 * A.row_norm_sq(argmax) * (1.0 - 1e-12));
            const index_t i = select_grk(rng, st, A);
            CHECK(st.s[i] * st.s[i] >= eps * snorm2 * A.row_norm_sq(i) * (1.0 - 1e-12));
            kaczmarz_project(st, i, A, 1.0);
            residual_update(st, i, C, 1.0);
        }
    }
    CHECK(steps == 10000);
}

TEST_CASE("run_inner on identity solves in m projections for every method") {
    auto I4 = SparseMatrix::from_triplets(4, 4, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}, {3, 3, 1.0}});
    auto C = GramMatrix::build(I4);
    DenseVector v{1.0, 2.0, 3.0, 4.0};
    for (InnerTag tag : {InnerTag::NESOR, InnerTag::GK, InnerTag::RK, InnerTag::GRK}) {
        Rng rng(17);
        auto res = run_inner(InnerMethod{tag, 1.0}, I4, &C, v, 1000, 1e-14, rng);
        for (int i = 0; i < 4; ++i) CHECK(res.z[i] == doctest::Approx(v[i]));
        CHECK(res.final_residual_norm <= 1e-12);
        CHECK(res.reached_threshold);
    }
}

TEST_CASE("run_inner with zero rhs returns immediately") {
    auto A = oracles::random_sparse(6, 4, 0.5, 12);
    Rng rng(0);
    auto res = run_inner(InnerMethod{InnerTag::GK, 1.0}, A, nullptr, DenseVector(6, 0.0), 100, 0.5, rng);
    CHECK(res.projections_used == 0);
    CHECK(norm2(res.z) == 0.0);
}

TEST_CASE("grk run converges to the minimum-norm solution of Az=v") {
    auto A = oracles::random_sparse(10, 6, 0.6, 55);
    auto C = GramMatrix::build(A, 0.0);
    // consistent v = A z0
    Rng rng(9);
    auto z0 = oracles::random_vector(6, rng);
    auto v = A.multiply(z0);
    auto res = run_inner(InnerMethod{InnerTag::GRK, 1.0}, A, &C, v, 10000, 1e-8, rng);
    CHECK(res.final_residual_norm <= 1e-8 * norm2(v));
    auto zmin = oracles::pinv_solve(oracles::DenseMatrix::from_sparse(A), v);
    double dev = 0.0;
    for (int j = 0; j < 6; ++j) dev = std::max(dev, std::fabs(res.z[j] - zmin[j]));
    CHECK(dev <= 1e-6 * std::max(1.0, norm2(zmin)));
}

TEST_CASE("one NESOR sweep equals cyclic relaxed projections") {
    auto A = oracles::random_sparse(9, 5, 0.5, 31);
    Rng rng(13);
    auto v = oracles::random_vector(9, rng);
    const double omega = 1.4;
    Rng r2(0);
    auto res = run_inner(InnerMethod{InnerTag::NESOR, omega}, A, nullptr, v, 9, 0.0, r2);

    auto st = make_state(A, v);
    for (index_t i = 0; i < 9; ++i) {
        st.s[i] = v[i] - A.row_dot(i, st.z);
        kaczmarz_project(st, i, A, omega);
    }
    for (int j = 0; j < 5; ++j) CHECK(res.z[j] == st.z[j]);  // identical arithmetic
    CHECK(res.projections_used == 9);
}

TEST_CASE("inner iterates stay in the row space of A") {
    Rng rng(99);
    for (InnerTag tag : {InnerTag::NESOR, InnerTag::GK, InnerTag::RK, InnerTag::GRK}) {
        auto A = oracles::random_sparse(8, 12, 0.4, 404);  // underdetermined
        auto C = GramMatrix::build(A, 0.0);
        auto z0 = oracles::random_vector(12, rng);
        auto v = A.multiply(z0);
        auto res = run_inner(InnerMethod{tag, 1.2}, A, &C, v, 500, 1e-6, rng);
        // project z onto null(A) via SVD: components beyond rank must vanish
        auto f = oracles::svd(oracles::DenseMatrix::from_sparse(A));
        DenseVector proj(res.z.size(), 0.0);
        for (std::size_t k = 0; k < f.s.size(); ++k) {
            if (f.s[k] <= 1e-10 * f.s[0]) continue;
            double coeff = 0.0;
            for (index_t j = 0; j < 12; ++j) coeff += f.v.at(j, static_cast<index_t>(k)) * res.z[j];
            for (index_t j = 0; j < 12; ++j) proj[j] += f.v.at(j, static_cast<index_t>(k)) * coeff;
        }
        double dev = 0.0;
        for (std::size_t j = 0; j < proj.size(); ++j) dev = std::max(dev, std::fabs(proj[j] - res.z[j]));
        CHECK(dev <= 1e-8);
    }
}

TEST_CASE("fixed seed gives bit-identical RK and GRK runs") {
    auto A = oracles::random_sparse(15, 10, 0.3, 61);
    auto C = GramMatrix::build(A, 0.0);
    Rng rv(2);
    auto v = oracles::random_vector(15, rv);
    for (InnerTag tag : {InnerTag::RK, InnerTag::GRK}) {
        Rng a(12345), b(12345);
        auto ra = run_inner(InnerMethod{tag, 1.1}, A, &C, v, 300, 1e-10, a);
        auto rb = run_inner(InnerMethod{tag, 1.1}, A, &C, v, 300, 1e-10, b);
        CHECK(ra.projections_used == rb.projections_used);
        REQUIRE(ra.z.size() == rb.z.size());
        for (std::size_t j = 0; j < ra.z.size(); ++j) CHECK(ra.z[j] == rb.z[j]);
    }
}

TEST_CASE("distance to the solution is nonincreasing for omega = 1") {
    // orthogonal projections contract ||z - z_star|| at every step
    auto A = oracles::random_sparse(12, 7, 0.5, 71);
    Rng rng(6);
    auto z0 = oracles::random_vector(7, rng);
    auto v = A.multiply(z0);
    auto zstar = oracles::pinv_solve(oracles::DenseMatrix::from_sparse(A), v);
    auto st = make_state(A, v);
    auto dist = [&] {
        double acc = 0.0;
        for (int j = 0; j < 7; ++j) acc += (st.z[j] - zstar[j]) * (st.z[j] - zstar[j]);
        return std::sqrt(acc);
    };
    double prev = dist();
    for (int p = 0; p < 300; ++p) {
        st.s = true_residual(A, v, st.z);
        if (norm2(st.s) < 1e-14) break;
        index_t i = select_gk(st.s);
        kaczmarz_project(st, i, A, 1.0);
        const double cur = dist();
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("long recursive runs stay within the drift bound") {
    auto A = oracles::random_sparse(20, 12, 0.3, 83);
    auto C = GramMatrix::build(A, 0.0);
    Rng rng(14);
    auto z0 = oracles::random_vector(12, rng);
    auto v = A.multiply(z0);
    std::vector<std::pair<long, double>> cps;
    InnerRunOptions opts;
    opts.checkpoints = &cps;
    auto res = run_inner(InnerMethod{InnerTag::GRK, 1.3}, A, &C, v, 10 * 20 + 50, 0.0, rng, opts);
    auto exact = true_residual(A, v, res.z);
    CHECK(norm2(exact) <= res.final_residual_norm + 1e-10 * (norm2(v) + 1.0));
    CHECK(!cps.empty());
}

TEST_CASE("run_inner validates its inputs") {
    auto A = oracles::random_sparse(4, 3, 0.6, 1);
    Rng rng(0);
    DenseVector v(4, 1.0);
    CHECK_THROWS_AS(run_inner(InnerMethod{InnerTag::GK, 1.0}, A, nullptr, v, 0, 0.5, rng), DomainError);
    CHECK_THROWS_AS(run_inner(InnerMethod{InnerTag::GK, 1.0}, A, nullptr, v, 10, 1.5, rng), DomainError);
    CHECK_THROWS_AS(run_inner(InnerMethod{InnerTag::GK, 1.0}, A, nullptr, DenseVector(3, 1.0), 10, 0.5, rng),
                    DimensionMismatch);
}
