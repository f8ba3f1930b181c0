#include "flexkacz/genmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flexkacz/errors.hpp"

namespace flexkacz {

void ProblemSpec::validate() const {
    if (m < 1 || n < 1) throw DomainError("problem dimensions must be positive");
    if (!(density > 0.0 && density <= 1.0)) throw DomainError("density must lie in (0, 1]");
    if (!(kappa >= 1.0)) throw DomainError("kappa must be >= 1");
    const index_t rmax = m < n ? m : n;
    if (rank < 0 || rank > rmax) throw DomainError("rank must lie in [0, min(m, n)]");
    const double target_nnz = density * static_cast<double>(m) * static_cast<double>(n);
    if (target_nnz < static_cast<double>(effective_rank()))
        throw InfeasibleDensity("density too low to realize rank " + std::to_string(effective_rank()));
}

namespace {

double normal_draw(Rng& rng) {
    // Box-Muller; 1 - u keeps the log argument positive
    const double u = 1.0 - rng.next_double();
    const double v = rng.next_double();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.14159265358979323846 * v);
}

struct DenseWork {
    index_t m, n;
    std::vector<double> w;  // row-major

    double& at(index_t i, index_t j) { return w[static_cast<std::size_t>(i) * n + j]; }
    double at(index_t i, index_t j) const { return w[static_cast<std::size_t>(i) * n + j]; }

    void rotate_rows(index_t a, index_t b, double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        double* ra = w.data() + static_cast<std::size_t>(a) * n;
        double* rb = w.data() + static_cast<std::size_t>(b) * n;
        for (index_t j = 0; j < n; ++j) {
            const double x = ra[j], y = rb[j];
            ra[j] = c * x + s * y;
            rb[j] = -s * x + c * y;
        }
    }

    void rotate_cols(index_t a, index_t b, double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        for (index_t i = 0; i < m; ++i) {
            const double x = at(i, a), y = at(i, b);
            at(i, a) = c * x + s * y;
            at(i, b) = -s * x + c * y;
        }
    }

    index_t count_nonzeros(double tiny) const {
        index_t c = 0;
        for (double v : w)
            if (std::fabs(v) > tiny) ++c;
        return c;
    }
};

}  // namespace

SparseMatrix random_ill_conditioned(const ProblemSpec& spec) {
    spec.validate();
    const index_t m = spec.m, n = spec.n;
    const index_t r = spec.effective_rank();
    Rng rng(spec.seed);

    DenseWork work{m, n, std::vector<double>(static_cast<std::size_t>(m) * n, 0.0)};
    for (index_t i = 0; i < r; ++i) {
        const double expo = r > 1 ? static_cast<double>(i) / static_cast<double>(r - 1) : 0.0;
        work.at(i, i) = std::pow(spec.kappa, -expo);
    }

    const auto tau = [&] { return rng.next_double() * 2.0 * 3.14159265358979323846; };
    const double tiny = 1e-14;
    const index_t target_nnz =
        std::max<index_t>(r, static_cast<index_t>(std::llround(spec.density * static_cast<double>(m) * n)));

    // Orthogonal mixing keeps the singular values exact, so the spectrum
    // never needs repairing: fill grows one rotation at a time and the loop
    // stops as soon as the target count is reached (overshoot bounded by a
    // single row/column union).
    auto count_row = [&](index_t i) {
        index_t c = 0;
        for (index_t j = 0; j < n; ++j)
            if (std::fabs(work.at(i, j)) > tiny) ++c;
        return c;
    };
    auto count_col = [&](index_t j) {
        index_t c = 0;
        for (index_t i = 0; i < m; ++i)
            if (std::fabs(work.at(i, j)) > tiny) ++c;
        return c;
    };
    index_t nnz_count = work.count_nonzeros(tiny);
    auto mix_rows = [&](index_t a, index_t b) {
        nnz_count -= count_row(a) + count_row(b);
        work.rotate_rows(a, b, tau());
        nnz_count += count_row(a) + count_row(b);
    };
    auto mix_cols = [&](index_t a, index_t b) {
        nnz_count -= count_col(a) + count_col(b);
        work.rotate_cols(a, b, tau());
        nnz_count += count_col(a) + count_col(b);
    };

    // give every row and column support before the random mixing; touching
    // every row costs at most m nonzeros, so it never overshoots a target
    // of at least m (below that some rows must stay empty anyway)
    const bool touch_all_rows = target_nnz >= m;
    for (index_t i = r; i < m; ++i) {
        if (!touch_all_rows && nnz_count >= target_nnz) break;
        mix_rows(i, static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(r)));
    }
    for (index_t j = r; j < n && nnz_count < target_nnz; ++j)
        mix_cols(j, static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(r)));

    const long max_rotations = 64 * static_cast<long>(m + n) + 10000;
    for (long t = 0; t < max_rotations && nnz_count < target_nnz; ++t) {
        if (m > 1) {
            index_t a = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(m));
            index_t b = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(m - 1));
            if (b >= a) ++b;
            mix_rows(a, b);
        }
        if (n > 1 && nnz_count < target_nnz) {
            index_t a = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(n));
            index_t b = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
            if (b >= a) ++b;
            mix_cols(a, b);
        }
    }

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(target_nnz));
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < n; ++j) {
            const double v = work.at(i, j);
            if (std::fabs(v) > tiny) entries.push_back({i, j, v});
        }
    SparseMatrix A = SparseMatrix::from_triplets(m, n, std::move(entries));
    return A;
}

std::pair<DenseVector, DenseVector> make_consistent_rhs(const SparseMatrix& A, std::uint64_t seed) {
    if (A.rows() < 1 || A.cols() < 1) throw DomainError("make_consistent_rhs: empty matrix");
    Rng rng(seed);
    DenseVector x_star(static_cast<std::size_t>(A.cols()));
    for (auto& v : x_star) v = normal_draw(rng);
    return {A.multiply(x_star), std::move(x_star)};
}

}  // namespace flexkacz
