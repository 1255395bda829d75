#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oda/tasks.hpp"

namespace oda {

struct MixtureComponent {
    Vec mean;
    Vec cov_diag;  // per-coordinate variances
    double weight = 0.0;
    std::optional<std::string> label;
};

struct MixtureSpec {
    std::vector<MixtureComponent> components;
    std::size_t count = 0;
    bool labeled = false;  // attach labels (component label, or its index)
};

// Seeded draws from a diagonal-covariance Gaussian mixture.
LabeledDataset synthesize_mixture(const MixtureSpec& spec, std::uint64_t seed);

// 2-D concentric rings: radius uniform within [radius - width/2, radius + width/2],
// angle uniform.
struct RingComponent {
    double radius = 1.0;
    double width = 0.2;
    double weight = 0.0;
    std::optional<std::string> label;
};

struct CirclesSpec {
    std::vector<RingComponent> rings;
    Vec center{0.0, 0.0};
    std::size_t count = 0;
    bool labeled = true;
};

LabeledDataset synthesize_circles(const CirclesSpec& spec, std::uint64_t seed);

}  // namespace oda
