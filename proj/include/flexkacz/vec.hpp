#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace flexkacz {

using index_t = std::ptrdiff_t;
using DenseVector = std::vector<double>;

inline double dot(const DenseVector& a, const DenseVector& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double norm2_sq(const DenseVector& a) { return dot(a, a); }

inline double norm2(const DenseVector& a) { return std::sqrt(norm2_sq(a)); }

/// y += c * x
inline void axpy(double c, const DenseVector& x, DenseVector& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(DenseVector& x, double c) {
    for (auto& v : x) v *= c;
}

inline bool all_finite(const DenseVector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace flexkacz
