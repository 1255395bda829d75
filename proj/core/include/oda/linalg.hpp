#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "oda/errors.hpp"

namespace oda {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// Dense row-major square matrix, only used for small diagnostics (Hessians,
// per-prototype covariances); hot paths never touch it.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
// Deterministic start vector; adequate for the low-dimensional
// covariance/Hessian products that feed the bifurcation diagnostic.
inline double max_eigenvalue_sym(const SquareMatrix& m, int iterations = 256) {
    const std::size_t n = m.n;
    if (n == 0) return 0.0;
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i);
    for (int it = 0; it < iterations; ++it) {
        Vec w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += m.at(i, j) * v[j];
        const double nw = norm2(w);
        if (nw <= 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    }
    // Rayleigh quotient refines the final estimate.
    Vec w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i] += m.at(i, j) * v[j];
    return dot(v, w) / dot(v, v);
}

}  // namespace oda
