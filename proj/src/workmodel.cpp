#include "flexkacz/workmodel.hpp"

#include <cmath>

#include "flexkacz/errors.hpp"

namespace flexkacz {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    if (r > UINT64_MAX) throw OverflowError("work-model product overflows 64 bits");
    return static_cast<std::uint64_t>(r);
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (a > UINT64_MAX - b) throw OverflowError("work-model sum overflows 64 bits");
    return a + b;
}

}  // namespace

std::uint64_t w_gk_dense(std::uint64_t k, std::uint64_t ell, std::uint64_t m, std::uint64_t n) {
    if (k < 1 || ell < 1 || m < 1 || n < 1) throw DomainError("w_gk_dense: all arguments must be >= 1");
    return checked_mul(checked_mul(k, ell), checked_add(checked_mul(m, n), n));
}

std::uint64_t w_mgk_dense(std::uint64_t k, std::uint64_t ell, std::uint64_t m, std::uint64_t n) {
    if (k < 1 || ell < 1 || m < 1 || n < 1) throw DomainError("w_mgk_dense: all arguments must be >= 1");
    return checked_add(checked_mul(checked_mul(m, m), n), checked_mul(checked_mul(k, ell), checked_add(m, n)));
}

double crossover_dense(std::uint64_t m, std::uint64_t n) {
    if (n < 2) throw DomainError("crossover_dense requires n >= 2");
    return static_cast<double>(m) * (1.0 + 1.0 / (static_cast<double>(n) - 1.0));
}

double w_gk_sparse(std::uint64_t k, std::uint64_t ell, std::uint64_t m, double q) {
    if (k < 1 || ell < 1 || m < 1 || q <= 0.0) throw DomainError("w_gk_sparse: bad arguments");
    return static_cast<double>(k) * static_cast<double>(ell) * q * (static_cast<double>(m) + 1.0);
}

double w_mgk_sparse(std::uint64_t k, std::uint64_t ell, std::uint64_t m, double q, double p) {
    if (k < 1 || ell < 1 || m < 1 || q <= 0.0 || p < 0.0) throw DomainError("w_mgk_sparse: bad arguments");
    const double md = static_cast<double>(m);
    return q * md * md + static_cast<double>(k) * static_cast<double>(ell) * (q + md * p);
}

double crossover_sparse(std::uint64_t m, double q, double p) {
    if (m < 1 || q <= 0.0 || p < 0.0) throw DomainError("crossover_sparse: bad arguments");
    if (q <= p) throw DomainError("crossover_sparse: no crossover when q <= p");
    return static_cast<double>(m) * (1.0 + p / (q - p));
}

double predicted_gram_density(std::uint64_t m, std::uint64_t n, double d) {
    if (m < 1 || n < 1) throw DomainError("predicted_gram_density: m, n must be >= 1");
    if (d < 0.0 || d > 1.0) throw DomainError("predicted_gram_density: d must be in [0, 1]");
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double p = 1.0 - (1.0 + 1.0 / md) * std::pow(1.0 - d * d, nd) + std::pow(1.0 - d, nd) / md;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

}  // namespace flexkacz
