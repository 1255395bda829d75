#include "oda/divergence.hpp"

#include <cmath>

namespace oda {

DivergenceKind parse_divergence_kind(std::string_view token) {
    if (token == "sq_euclidean") return DivergenceKind::SquaredEuclidean;
    if (token == "gen_i_divergence") return DivergenceKind::GeneralizedIDivergence;
    throw ConfigError("unknown divergence token: " + std::string(token) +
                      " (expected sq_euclidean | gen_i_divergence)");
}

std::string divergence_token(DivergenceKind kind) {
    switch (kind) {
        case DivergenceKind::SquaredEuclidean: return "sq_euclidean";
        case DivergenceKind::GeneralizedIDivergence: return "gen_i_divergence";
    }
    return "unknown";
}

Divergence::Divergence(DivergenceKind kind, std::size_t dimension)
    : kind_(kind), dim_(dimension) {
    if (dimension == 0) throw ConfigError("divergence dimension must be positive");
}

bool Divergence::in_domain(const Vec& x) const {
    if (x.size() != dim_) return false;
    for (const double c : x) {
        if (!std::isfinite(c)) return false;
        if (kind_ == DivergenceKind::GeneralizedIDivergence && c <= kPositiveFloor) return false;
    }
    return true;
}

void Divergence::require_valid(const Vec& x) const {
    if (x.size() != dim_)
        throw DimensionMismatch("vector length " + std::to_string(x.size()) +
                                " does not match divergence dimension " + std::to_string(dim_));
    for (const double c : x) {
        if (!std::isfinite(c)) throw DomainError("non-finite coordinate");
        if (kind_ == DivergenceKind::GeneralizedIDivergence && c <= kPositiveFloor)
            throw DomainError("I-divergence requires strictly positive coordinates, got " +
                              std::to_string(c));
    }
}

double Divergence::phi(const Vec& x) const {
    require_valid(x);
    double s = 0.0;
    switch (kind_) {
        case DivergenceKind::SquaredEuclidean:
            for (const double c : x) s += c * c;
            break;
        case DivergenceKind::GeneralizedIDivergence:
            for (const double c : x) s += c * std::log(c);
            break;
    }
    return s;
}

double Divergence::bregman(const Vec& x, const Vec& mu) const {
    require_valid(x);
    require_valid(mu);
    double s = 0.0;
    switch (kind_) {
        case DivergenceKind::SquaredEuclidean:
            for (std::size_t i = 0; i < dim_; ++i) {
                const double d = x[i] - mu[i];
                s += d * d;
            }
            break;
        case DivergenceKind::GeneralizedIDivergence:
            // <x, log x - log mu> - <1, x - mu>
            for (std::size_t i = 0; i < dim_; ++i)
                s += x[i] * (std::log(x[i]) - std::log(mu[i])) - (x[i] - mu[i]);
            break;
    }
    // Strict convexity guarantees non-negativity; clamp the last-ulp noise so
    // callers can rely on d >= 0.
    return s < 0.0 ? 0.0 : s;
}

Vec Divergence::grad_second_arg(const Vec& x, const Vec& mu) const {
    require_valid(x);
    require_valid(mu);
    Vec g(dim_);
    switch (kind_) {
        case DivergenceKind::SquaredEuclidean:
            for (std::size_t i = 0; i < dim_; ++i) g[i] = -2.0 * (x[i] - mu[i]);
            break;
        case DivergenceKind::GeneralizedIDivergence:
            for (std::size_t i = 0; i < dim_; ++i) g[i] = -(x[i] - mu[i]) / mu[i];
            break;
    }
    return g;
}

Vec Divergence::hessian_diag(const Vec& mu) const {
    require_valid(mu);
    Vec h(dim_);
    switch (kind_) {
        case DivergenceKind::SquaredEuclidean:
            for (std::size_t i = 0; i < dim_; ++i) h[i] = 2.0;
            break;
        case DivergenceKind::GeneralizedIDivergence:
            for (std::size_t i = 0; i < dim_; ++i) h[i] = 1.0 / mu[i];
            break;
    }
    return h;
}

SquareMatrix Divergence::hessian_phi(const Vec& mu) const {
    const Vec h = hessian_diag(mu);
    SquareMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i) m.at(i, i) = h[i];
    return m;
}

}  // namespace oda
