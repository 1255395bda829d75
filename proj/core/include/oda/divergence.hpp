#pragma once

#include <string>
#include <string_view>

#include "oda/linalg.hpp"

namespace oda {

enum class DivergenceKind {
    SquaredEuclidean,      // phi(x) = <x,x>
    GeneralizedIDivergence  // phi(x) = <x, log x>, strictly positive domain
};

DivergenceKind parse_divergence_kind(std::string_view token);
std::string divergence_token(DivergenceKind kind);

// A Bregman divergence d_phi(x, mu) = phi(x) - phi(mu) - <grad phi(mu), x - mu>
// for a strictly convex generator phi. Pure value type; all member functions
// are const and thread-safe.
class Divergence {
public:
    Divergence(DivergenceKind kind, std::size_t dimension);

    DivergenceKind kind() const { return kind_; }
    std::size_t dimension() const { return dim_; }

    // True iff every coordinate is valid for the generator's domain.
    bool in_domain(const Vec& x) const;

    // Throws DomainError / DimensionMismatch instead of returning garbage.
    void require_valid(const Vec& x) const;

    double phi(const Vec& x) const;

    double operator()(const Vec& x, const Vec& mu) const { return bregman(x, mu); }
    double bregman(const Vec& x, const Vec& mu) const;

    // Derivative of d_phi with respect to the second argument:
    //   -H_phi(mu) (x - mu).
    Vec grad_second_arg(const Vec& x, const Vec& mu) const;

    // Hessian of the generator at mu, dense for diagnostics only.
    SquareMatrix hessian_phi(const Vec& mu) const;

    // Hessian diagonal; both supported generators have diagonal Hessians.
    Vec hessian_diag(const Vec& mu) const;

    // Coordinates at or below this are rejected by the I-divergence domain.
    static constexpr double kPositiveFloor = 1e-12;

private:
    DivergenceKind kind_;
    std::size_t dim_;
};

}  // namespace oda
