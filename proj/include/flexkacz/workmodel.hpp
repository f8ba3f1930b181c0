#pragma once

#include <cstdint>

namespace flexkacz {

/// Per-solve counters in the appendix cost-model's units (not exact FLOPs):
/// selection charged m*n per dense greedy step (nz + q sparse), projection
/// n (q sparse), residual update m (m*p expected sparse), Gram build m^2*n
/// (q*m^2 sparse). Real-valued because the sparse charges are expectations.
struct FlopCounter {
    double selection_flops = 0.0;
    double projection_flops = 0.0;
    double residual_update_flops = 0.0;
    double gram_build_flops = 0.0;

    double total() const { return selection_flops + projection_flops + residual_update_flops + gram_build_flops; }

    void reset() { *this = FlopCounter{}; }
};

/// Dense-model work of greedy Kaczmarz without a precomputed Gram matrix:
/// k*ell*(m*n + n). Throws OverflowError if the product overflows 64 bits.
std::uint64_t w_gk_dense(std::uint64_t k, std::uint64_t ell, std::uint64_t m, std::uint64_t n);

/// Dense-model work with the Gram matrix precomputed: m^2*n + k*ell*(m + n).
std::uint64_t w_mgk_dense(std::uint64_t k, std::uint64_t ell, std::uint64_t m, std::uint64_t n);

/// Real threshold m*(1 + 1/(n-1)); the Gram variant is cheaper iff
/// k*ell strictly exceeds it. Throws DomainError for n < 2.
double crossover_dense(std::uint64_t m, std::uint64_t n);

/// Sparse-model work: k*ell*q*(m+1) with q = nnz/m real-valued.
double w_gk_sparse(std::uint64_t k, std::uint64_t ell, std::uint64_t m, double q);

/// Sparse-model work with Gram: q*m^2 + k*ell*(q + m*p).
double w_mgk_sparse(std::uint64_t k, std::uint64_t ell, std::uint64_t m, double q, double p);

/// Threshold m*(1 + p/(q-p)). Throws DomainError when q <= p (the Gram
/// variant is never cheaper by this model).
double crossover_sparse(std::uint64_t m, double q, double p);

/// Estimated density of C = A A^T for an m x n matrix of density d with a
/// uniformly random sparsity pattern:
///   p = 1 - (1 + 1/m)(1 - d^2)^n + (1/m)(1 - d)^n.
double predicted_gram_density(std::uint64_t m, std::uint64_t n, double d);

}  // namespace flexkacz
