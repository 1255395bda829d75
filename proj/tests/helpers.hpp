#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oda/model.hpp"

namespace oda_test {

struct ProtoSpec {
    oda::Vec mu;
    double rho = 1.0;
    std::optional<std::string> label;
};

inline oda::Schedule loose_schedule() {
    oda::Schedule s;
    s.t_init = 10.0;
    s.t_min = 0.01;
    s.k_max = 64;
    s.a = 2.0;
    s.b = 0.05;
    return s;
}

// Builds a model in a prescribed state through the snapshot path.
inline oda::OdaModel make_model(oda::DivergenceKind kind, std::size_t dim, double temperature,
                                std::vector<ProtoSpec> protos,
                                oda::Schedule sched = loose_schedule(),
                                std::uint64_t seed = 12345) {
    sched.t_init = std::max(sched.t_init, temperature);
    oda::OdaModel::Snapshot snap{oda::Divergence(kind, dim), sched, temperature, {}, {}, 0};
    for (auto& p : protos) {
        oda::Prototype proto;
        proto.mu = std::move(p.mu);
        proto.rho = p.rho;
        proto.label = std::move(p.label);
        snap.prototypes.push_back(std::move(proto));
    }
    return oda::OdaModel::from_snapshot(std::move(snap), seed);
}

}  // namespace oda_test
