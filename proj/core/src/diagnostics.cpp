#include "oda/diagnostics.hpp"

#include <cmath>
#include <string>

namespace oda {

std::vector<double> critical_temperature_diagnostic(const OdaModel& model,
                                                    const std::vector<Vec>& samples) {
    const std::size_t k = model.prototype_count();
    const std::size_t dim = model.divergence().dimension();
    if (k == 0) throw DegenerateModel("model has no prototypes");

    std::vector<SquareMatrix> scatter(k, SquareMatrix(dim));
    std::vector<double> weight(k, 0.0);
    std::vector<std::size_t> support(k, 0);

    for (const Vec& x : samples) {
        const Vec p = model.gibbs_memberships(x);
        for (std::size_t i = 0; i < k; ++i) {
            if (!(p[i] > 0.0)) continue;
            const Vec& y = model.prototypes()[i].mu;
            for (std::size_t r = 0; r < dim; ++r)
                for (std::size_t c = 0; c < dim; ++c)
                    scatter[i].at(r, c) += p[i] * (x[r] - y[r]) * (x[c] - y[c]);
            weight[i] += p[i];
            ++support[i];
        }
    }

    std::vector<double> t_crit(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (support[i] < dim + 1)
            throw InsufficientSamples("prototype " + std::to_string(i) + " has only " +
                                      std::to_string(support[i]) +
                                      " supporting samples, need dimension+1");
        SquareMatrix cov(dim);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                cov.at(r, c) = scatter[i].at(r, c) / weight[i];

        // H_phi is diagonal for both supported generators; fold it in
        // symmetrically as sqrt(H) C sqrt(H), which shares eigenvalues with
        // H C and keeps the power iteration on a symmetric matrix.
        const Vec h = model.divergence().hessian_diag(model.prototypes()[i].mu);
        SquareMatrix sym(dim);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                sym.at(r, c) = std::sqrt(h[r]) * cov.at(r, c) * std::sqrt(h[c]);

        const double lambda_max = max_eigenvalue_sym(sym);
        t_crit[i] = lambda_max > 0.0 ? 1.0 / lambda_max : kNoFiniteCriticalTemperature;
    }
    return t_crit;
}

}  // namespace oda
