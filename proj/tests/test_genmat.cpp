#include "doctest.h"

#include <cmath>

#include "flexkacz/errors.hpp"
#include "flexkacz/genmat.hpp"
#include "oracles.hpp"

using namespace flexkacz;

TEST_CASE("problem spec validation") {
    ProblemSpec bad;
    bad.m = 10;
    bad.n = 8;
    bad.density = 0.01;
    bad.rank = 5;  // 0.01 * 80 = 0.8 nonzeros cannot carry rank 5
    CHECK_THROWS_AS(random_ill_conditioned(bad), InfeasibleDensity);

    ProblemSpec zero;
    CHECK_THROWS_AS(random_ill_conditioned(zero), DomainError);

    ProblemSpec neg;
    neg.m = 10;
    neg.n = 8;
    neg.kappa = 0.5;
    CHECK_THROWS_AS(random_ill_conditioned(neg), DomainError);
}

TEST_CASE("kappa = 1 produces a flat singular spectrum") {
    ProblemSpec spec;
    spec.m = 25;
    spec.n = 15;
    spec.density = 0.4;
    spec.kappa = 1.0;
    spec.seed = 3;
    auto A = random_ill_conditioned(spec);
    CHECK(A.rows() == 25);
    CHECK(A.cols() == 15);
    auto f = oracles::svd(oracles::DenseMatrix::from_sparse(A));
    REQUIRE(f.s.size() >= 15);
    const double smax = f.s[0];
    const double smin = f.s[14];
    CHECK(smax / smin <= 1.01);
}

TEST_CASE("full-density square kappa = 1 matrix is orthogonal-like") {
    ProblemSpec spec;
    spec.m = 10;
    spec.n = 10;
    spec.rank = 10;
    spec.density = 1.0;
    spec.kappa = 1.0;
    spec.seed = 17;
    auto A = random_ill_conditioned(spec);
    CHECK(A.nnz() == 100);
    auto f = oracles::svd(oracles::DenseMatrix::from_sparse(A));
    for (int i = 0; i < 10; ++i) CHECK(f.s[i] == doctest::Approx(f.s[0]).epsilon(1e-8));
}

TEST_CASE("target condition number is achieved within a factor of two") {
    for (double kappa : {1e2, 1e3}) {
        ProblemSpec spec;
        spec.m = 50;
        spec.n = 20;
        spec.density = 0.3;
        spec.kappa = kappa;
        spec.seed = 11;
        auto A = random_ill_conditioned(spec);
        auto f = oracles::svd(oracles::DenseMatrix::from_sparse(A));
        const double measured = f.s[0] / f.s[19];
        CHECK(measured >= kappa / 2.0);
        CHECK(measured <= 2.0 * kappa);
    }
}

TEST_CASE("requested rank is achieved exactly") {
    ProblemSpec spec;
    spec.m = 50;
    spec.n = 20;
    spec.density = 0.3;
    spec.kappa = 10.0;
    spec.rank = 15;
    spec.seed = 7;
    auto A = random_ill_conditioned(spec);
    auto D = oracles::DenseMatrix::from_sparse(A);
    CHECK(oracles::numeric_rank(D) == 15);
    auto f = oracles::svd(D);
    // the 15 kept values stay well separated from the discarded ones
    CHECK(f.s[14] >= 1e-8 * f.s[0]);
    CHECK(f.s[15] <= 1e-10 * f.s[0]);
}

TEST_CASE("generation is deterministic in the seed") {
    ProblemSpec spec;
    spec.m = 20;
    spec.n = 12;
    spec.density = 0.3;
    spec.kappa = 50.0;
    spec.seed = 99;
    auto A = random_ill_conditioned(spec);
    auto B = random_ill_conditioned(spec);
    REQUIRE(A.nnz() == B.nnz());
    for (index_t k = 0; k < A.nnz(); ++k) {
        CHECK(A.values()[k] == B.values()[k]);
        CHECK(A.col_idx()[k] == B.col_idx()[k]);
    }
    spec.seed = 100;
    auto Cm = random_ill_conditioned(spec);
    bool differs = Cm.nnz() != A.nnz();
    for (index_t k = 0; !differs && k < A.nnz(); ++k) differs = Cm.values()[k] != A.values()[k];
    CHECK(differs);
}

TEST_CASE("no zero rows and density near the target") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        ProblemSpec spec;
        spec.m = 50;
        spec.n = 30;
        spec.density = 0.25;
        spec.kappa = 100.0;
        spec.seed = seed;
        auto A = random_ill_conditioned(spec);
        CHECK(A.count_zero_rows() == 0);
        CHECK(A.density() == doctest::Approx(0.25).epsilon(0.10));
    }
}

TEST_CASE("consistent right-hand sides") {
    ProblemSpec spec;
    spec.m = 30;
    spec.n = 18;
    spec.density = 0.3;
    spec.kappa = 20.0;
    spec.seed = 13;
    auto A = random_ill_conditioned(spec);
    auto [b, xs] = make_consistent_rhs(A, 21);
    REQUIRE(b.size() == 30);
    REQUIRE(xs.size() == 18);
    auto ax = A.multiply(xs);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i] == ax[i]);

    auto [b2, xs2] = make_consistent_rhs(A, 21);
    CHECK(b2 == b);
    CHECK(xs2 == xs);
    auto [b3, xs3] = make_consistent_rhs(A, 22);
    CHECK(xs3 != xs);

    // standard normal entries: crude moment checks on a larger draw
    ProblemSpec big = spec;
    big.m = 60;
    big.n = 400;
    big.density = 0.05;
    auto Abig = random_ill_conditioned(big);
    auto [bb, xb] = make_consistent_rhs(Abig, 4);
    double mean = 0.0, var = 0.0;
    for (double v : xb) mean += v;
    mean /= static_cast<double>(xb.size());
    for (double v : xb) var += (v - mean) * (v - mean);
    var /= static_cast<double>(xb.size());
    CHECK(std::fabs(mean) <= 0.2);
    CHECK(var == doctest::Approx(1.0).epsilon(0.3));
}
