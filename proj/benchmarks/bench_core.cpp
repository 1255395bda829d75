#include <benchmark/benchmark.h>

#include "oda/divergence.hpp"
#include "oda/envs/cartpole.hpp"
#include "oda/model.hpp"
#include "oda/rng.hpp"

namespace {

oda::OdaModel make_model(std::size_t k, std::size_t dim) {
    oda::Schedule s;
    s.t_init = 1.0;
    s.t_min = 1e-3;
    s.k_max = 2 * k;
    oda::SplitRng rng(k * 1315423911ULL + dim);
    std::vector<oda::Vec> mus;
    for (std::size_t i = 0; i < k; ++i) {
        oda::Vec mu(dim);
        for (auto& c : mu) c = rng.uniform(-1.0, 1.0);
        mus.push_back(std::move(mu));
    }
    return oda::OdaModel::init_clustering_many(
        oda::Divergence(oda::DivergenceKind::SquaredEuclidean, dim), s, std::move(mus), 1);
}

void BM_Bregman(benchmark::State& state) {
    const auto kind = state.range(0) == 0 ? oda::DivergenceKind::SquaredEuclidean
                                          : oda::DivergenceKind::GeneralizedIDivergence;
    const std::size_t dim = static_cast<std::size_t>(state.range(1));
    const oda::Divergence div(kind, dim);
    oda::SplitRng rng(3);
    oda::Vec x(dim), mu(dim);
    for (auto& c : x) c = rng.uniform(0.1, 2.0);
    for (auto& c : mu) c = rng.uniform(0.1, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(div.bregman(x, mu));
}
BENCHMARK(BM_Bregman)->Args({0, 2})->Args({0, 16})->Args({1, 2})->Args({1, 16});

void BM_GibbsMemberships(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const auto model = make_model(k, 8);
    oda::SplitRng rng(5);
    oda::Vec x(8);
    for (auto& c : x) c = rng.uniform(-1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(model.gibbs_memberships(x));
}
BENCHMARK(BM_GibbsMemberships)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

// Per-observation training cost; expected to scale linearly in K*d.
void BM_SaUpdate(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const auto dim = static_cast<std::size_t>(state.range(1));
    auto model = make_model(k, dim);
    oda::SplitRng rng(7);
    std::vector<oda::Observation> obs;
    for (int i = 0; i < 512; ++i) {
        oda::Vec x(dim);
        for (auto& c : x) c = rng.uniform(-1.0, 1.0);
        obs.push_back({std::move(x), {}});
    }
    std::size_t i = 0;
    for (auto _ : state) {
        model.sa_update(obs[i & 511]);
        ++i;
    }
}
BENCHMARK(BM_SaUpdate)->Args({4, 2})->Args({16, 2})->Args({64, 2})->Args({16, 16});

void BM_CartpoleStep(benchmark::State& state) {
    const oda::PhysicsParams params;
    oda::CartPoleState s{0.01, 0.02, -0.03, 0.04};
    double force = 10.0;
    for (auto _ : state) {
        const auto out = oda::step_cartpole(s, force, params);
        if (!out.failed) s = out.state;
        force = -force;
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_CartpoleStep);

}  // namespace

BENCHMARK_MAIN();
