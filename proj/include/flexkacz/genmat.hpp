#pragma once

#include <cstdint>
#include <utility>

#include "flexkacz/rng.hpp"
#include "flexkacz/sparse_matrix.hpp"

namespace flexkacz {

struct ProblemSpec {
    index_t m = 0;
    index_t n = 0;
    double density = 0.2;
    double kappa = 1.0;     // target ratio of largest to smallest nonzero singular value
    index_t rank = 0;       // 0 -> min(m, n)
    std::uint64_t seed = 0;

    index_t effective_rank() const { return rank > 0 ? rank : (m < n ? m : n); }
    void validate() const;
};

/// Sparse random matrix whose nonzero singular values span
/// [sigma_max/kappa, sigma_max] geometrically: a rank-r diagonal seed of
/// geometrically spaced values is spread by random Givens mixings on rows
/// and columns, one rotation at a time, until the target density is
/// reached. The mixing is orthogonal on both sides, so the singular values
/// are exact; the achieved density overshoots the target by at most one
/// rotation's worth of fill.
SparseMatrix random_ill_conditioned(const ProblemSpec& spec);

/// (b, x_star): x_star has iid standard normal entries (seeded) and
/// b = A x_star, so the system is consistent by construction.
std::pair<DenseVector, DenseVector> make_consistent_rhs(const SparseMatrix& A, std::uint64_t seed);

}  // namespace flexkacz
