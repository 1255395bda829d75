#include "oda/io/synth.hpp"

#include <cmath>

#include "oda/rng.hpp"

namespace oda {

namespace {

std::size_t pick_component(const std::vector<double>& weights, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace

LabeledDataset synthesize_mixture(const MixtureSpec& spec, std::uint64_t seed) {
    if (spec.components.empty()) throw SpecError("mixture needs at least one component");
    if (spec.count == 0) throw SpecError("mixture sample count must be positive");
    const std::size_t dim = spec.components.front().mean.size();
    if (dim == 0) throw SpecError("mixture component mean is empty");
    double total = 0.0;
    std::vector<double> weights;
    for (const auto& c : spec.components) {
        if (c.mean.size() != dim || c.cov_diag.size() != dim)
            throw SpecError("mixture component dimensions disagree");
        for (const double v : c.cov_diag)
            if (v < 0.0) throw SpecError("negative variance in mixture component");
        if (c.weight < 0.0) throw SpecError("negative mixture weight");
        total += c.weight;
        weights.push_back(c.weight);
    }
    if (std::abs(total - 1.0) > 1e-9) throw SpecError("mixture weights must sum to 1");

    SplitRng rng = SplitRng(seed).split("mixture");
    LabeledDataset data;
    data.dimension = dim;
    data.rows.reserve(spec.count);
    for (std::size_t n = 0; n < spec.count; ++n) {
        const std::size_t c = pick_component(weights, rng.uniform());
        const auto& comp = spec.components[c];
        Observation obs;
        obs.x.resize(dim);
        for (std::size_t i = 0; i < dim; ++i)
            obs.x[i] = comp.mean[i] + std::sqrt(comp.cov_diag[i]) * rng.normal();
        if (spec.labeled) {
            obs.label = comp.label ? *comp.label : std::to_string(c);
            data.classes.insert(*obs.label);
        }
        data.rows.push_back(std::move(obs));
    }
    return data;
}

LabeledDataset synthesize_circles(const CirclesSpec& spec, std::uint64_t seed) {
    if (spec.rings.empty()) throw SpecError("circles spec needs at least one ring");
    if (spec.count == 0) throw SpecError("circles sample count must be positive");
    if (spec.center.size() != 2) throw SpecError("circles are 2-D");
    double total = 0.0;
    std::vector<double> weights;
    for (const auto& r : spec.rings) {
        if (r.radius < 0.0 || r.width < 0.0) throw SpecError("ring radius/width must be >= 0");
        total += r.weight;
        weights.push_back(r.weight);
    }
    if (std::abs(total - 1.0) > 1e-9) throw SpecError("ring weights must sum to 1");

    SplitRng rng = SplitRng(seed).split("circles");
    LabeledDataset data;
    data.dimension = 2;
    data.rows.reserve(spec.count);
    for (std::size_t n = 0; n < spec.count; ++n) {
        const std::size_t c = pick_component(weights, rng.uniform());
        const auto& ring = spec.rings[c];
        const double angle = rng.uniform(0.0, 6.283185307179586476925286766559);
        const double radius = ring.radius + ring.width * (rng.uniform() - 0.5);
        Observation obs;
        obs.x = {spec.center[0] + radius * std::cos(angle),
                 spec.center[1] + radius * std::sin(angle)};
        if (spec.labeled) {
            obs.label = ring.label ? *ring.label : std::to_string(c);
            data.classes.insert(*obs.label);
        }
        data.rows.push_back(std::move(obs));
    }
    return data;
}

}  // namespace oda
