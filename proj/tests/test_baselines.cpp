#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oda/baselines.hpp"
#include "oda/io/synth.hpp"
#include "oda/rng.hpp"

using oda::BaselineResult;
using oda::Divergence;
using oda::DivergenceKind;
using oda::Observation;
using oda::ObservationSource;
using oda::Schedule;
using oda::SplitRng;
using oda::Vec;

namespace {

std::vector<Vec> points_of(const oda::LabeledDataset& d) {
    std::vector<Vec> pts;
    for (const auto& row : d.rows) pts.push_back(row.x);
    return pts;
}

ObservationSource resample(const std::vector<Vec>& data, std::uint64_t seed) {
    return [data, rng = SplitRng(seed)]() mutable -> std::optional<Observation> {
        return Observation{data[rng.uniform_index(data.size())], {}};
    };
}

}  // namespace

TEST_CASE("kmeans on the corners of a square") {
    const std::vector<Vec> data{{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
    const Divergence div(DivergenceKind::SquaredEuclidean, 2);
    const BaselineResult r = oda::kmeans_fit(data, 4, div, 7);
    CHECK(r.k == 4);
    CHECK(r.distortion_curve.back().distortion == 0.0);
    // every corner is hit exactly
    for (const auto& x : data) {
        double best = 1e300;
        for (const auto& c : r.centroids) best = std::min(best, div.bregman(x, c));
        CHECK(best == 0.0);
    }
}

TEST_CASE("kmeans with k=1 finds the mean") {
    SplitRng rng(30);
    std::vector<Vec> data;
    Vec mean{0.0, 0.0};
    for (int i = 0; i < 200; ++i) {
        const Vec x{rng.uniform(-2, 5), rng.uniform(1, 3)};
        mean[0] += x[0] / 200.0;
        mean[1] += x[1] / 200.0;
        data.push_back(x);
    }
    const BaselineResult r =
        oda::kmeans_fit(data, 1, Divergence(DivergenceKind::SquaredEuclidean, 2), 7);
    CHECK(r.centroids[0][0] == doctest::Approx(mean[0]).epsilon(1e-9));
    CHECK(r.centroids[0][1] == doctest::Approx(mean[1]).epsilon(1e-9));
}

TEST_CASE("kmeans separates two tight clusters") {
    SplitRng rng(31);
    std::vector<Vec> data;
    Vec mean_a{0.0, 0.0}, mean_b{0.0, 0.0};
    for (int i = 0; i < 50; ++i) {
        const Vec a{-5.0 + 0.1 * rng.normal(), 0.1 * rng.normal()};
        const Vec b{5.0 + 0.1 * rng.normal(), 0.1 * rng.normal()};
        mean_a[0] += a[0] / 50.0;
        mean_a[1] += a[1] / 50.0;
        mean_b[0] += b[0] / 50.0;
        mean_b[1] += b[1] / 50.0;
        data.push_back(a);
        data.push_back(b);
    }
    const BaselineResult r =
        oda::kmeans_fit(data, 2, Divergence(DivergenceKind::SquaredEuclidean, 2), 11);
    // brute-force oracle: the induced 2-partition is left/right, so centroids
    // must be the per-cluster means
    const bool first_is_left = r.centroids[0][0] < r.centroids[1][0];
    const Vec& left = first_is_left ? r.centroids[0] : r.centroids[1];
    const Vec& right = first_is_left ? r.centroids[1] : r.centroids[0];
    CHECK(left[0] == doctest::Approx(mean_a[0]).epsilon(1e-6));
    CHECK(right[0] == doctest::Approx(mean_b[0]).epsilon(1e-6));
}

TEST_CASE("kmeans distortion curve is non-increasing") {
    SplitRng rng(32);
    std::vector<Vec> data;
    for (int i = 0; i < 300; ++i) data.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
    const BaselineResult r =
        oda::kmeans_fit(data, 6, Divergence(DivergenceKind::SquaredEuclidean, 2), 13);
    for (std::size_t i = 1; i < r.distortion_curve.size(); ++i)
        CHECK(r.distortion_curve[i].distortion <=
              r.distortion_curve[i - 1].distortion * (1.0 + 1e-12));
}

TEST_CASE("kmeans rejects invalid k") {
    const std::vector<Vec> data{{0.0}, {1.0}};
    const Divergence div(DivergenceKind::SquaredEuclidean, 1);
    CHECK_THROWS_AS(oda::kmeans_fit(data, 0, div, 1), oda::InvalidK);
    CHECK_THROWS_AS(oda::kmeans_fit(data, 3, div, 1), oda::InvalidK);
}

TEST_CASE("svq with one centroid contracts to a constant stream") {
    ObservationSource stream = []() -> std::optional<Observation> {
        return Observation{{4.0, -1.0}, {}};
    };
    const BaselineResult r = oda::svq_fit(stream, 5000, 1, 1.0, 1.0,
                                          Divergence(DivergenceKind::SquaredEuclidean, 2),
                                          {{4.0, -1.0}}, 0);
    CHECK(r.centroids[0][0] == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(r.centroids[0][1] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("svq with vanishing stepsize freezes the initialization") {
    SplitRng rng(33);
    std::vector<Vec> data;
    for (int i = 0; i < 50; ++i) data.push_back({rng.uniform(1, 2), rng.uniform(1, 2)});
    // alpha = 1/(a + bn) with a = 1e30 is absorbed by O(1) coordinates, so the
    // centroids must still be data points picked by the warmup selection.
    const BaselineResult r = oda::svq_fit(resample(data, 5), 2000, 3, 1e30, 0.0,
                                          Divergence(DivergenceKind::SquaredEuclidean, 2), data, 0);
    const BaselineResult again = oda::svq_fit(resample(data, 5), 2000, 3, 1e30, 0.0,
                                              Divergence(DivergenceKind::SquaredEuclidean, 2),
                                              data, 0);
    for (int i = 0; i < 3; ++i) {
        CHECK(r.centroids[i] == again.centroids[i]);
        CHECK(std::count(data.begin(), data.end(), r.centroids[i]) == 1);
    }
}

TEST_CASE("svq running mean over two alternating points") {
    bool flip = false;
    ObservationSource stream = [&flip]() -> std::optional<Observation> {
        flip = !flip;
        return Observation{{flip ? 0.0 : 2.0}, {}};
    };
    const BaselineResult r = oda::svq_fit(stream, 10000, 1, 1.0, 1.0,
                                          Divergence(DivergenceKind::SquaredEuclidean, 1), {}, 0);
    CHECK(std::abs(r.centroids[0][0] - 1.0) < 1e-2);
}

TEST_CASE("svq throws when the stream cannot seed k centroids") {
    int remaining = 2;
    ObservationSource stream = [&remaining]() -> std::optional<Observation> {
        if (remaining-- <= 0) return std::nullopt;
        return Observation{{0.0}, {}};
    };
    CHECK_THROWS_AS(
        oda::svq_fit(stream, 10, 5, 1.0, 1.0, Divergence(DivergenceKind::SquaredEuclidean, 1), {},
                     0),
        oda::StreamExhausted);
}

TEST_CASE("batch DA at a very high temperature keeps one centroid at the mean") {
    SplitRng rng(34);
    std::vector<Vec> data;
    Vec mean{0.0, 0.0};
    for (int i = 0; i < 400; ++i) {
        const Vec x{rng.uniform(-3, 9), rng.uniform(-4, 2)};
        mean[0] += x[0] / 400.0;
        mean[1] += x[1] / 400.0;
        data.push_back(x);
    }
    Schedule s;
    s.t_init = 1e6;
    s.t_min = 0.9e6;
    s.gamma = 0.8;
    s.a = 2.0;
    const BaselineResult r =
        oda::batch_da_fit(data, s, Divergence(DivergenceKind::SquaredEuclidean, 2), 3);
    REQUIRE(r.k == 1);
    CHECK(r.centroids[0][0] == doctest::Approx(mean[0]).epsilon(1e-3));
    CHECK(r.centroids[0][1] == doctest::Approx(mean[1]).epsilon(1e-3));
}

TEST_CASE("batch DA with a huge eps_c takes one pass per level") {
    SplitRng rng(35);
    std::vector<Vec> data;
    for (int i = 0; i < 100; ++i) data.push_back({rng.uniform(-1, 1)});
    Schedule s;
    s.t_init = 10.0;
    s.t_min = 4.0;
    s.gamma = 0.8;
    s.eps_c = 1e9;
    const BaselineResult r =
        oda::batch_da_fit(data, s, Divergence(DivergenceKind::SquaredEuclidean, 1), 3);
    // level count = curve size when each level runs a single EM pass
    std::size_t levels = 0;
    for (double t = s.t_init; t >= s.t_min; t *= s.gamma) ++levels;
    CHECK(r.distortion_curve.size() == levels);
}

TEST_CASE("batch DA splits a two-component mixture near its means") {
    oda::MixtureSpec spec;
    spec.components = {{{-3.0, 0.0}, {0.5, 0.5}, 0.5, {}}, {{3.0, 0.0}, {0.5, 0.5}, 0.5, {}}};
    spec.count = 600;
    const auto data = points_of(oda::synthesize_mixture(spec, 91));
    Schedule s;
    s.t_init = 40.0;
    s.t_min = 1.2;
    s.gamma = 0.7;
    s.k_max = 8;
    s.eps_c = 1e-3;
    s.eps_n = 1e-3;
    const Divergence div(DivergenceKind::SquaredEuclidean, 2);
    const BaselineResult da = oda::batch_da_fit(data, s, div, 17);
    REQUIRE(da.k >= 2);
    double best_neg = 1e300, best_pos = 1e300;
    for (const auto& c : da.centroids) {
        best_neg = std::min(best_neg, std::hypot(c[0] + 3.0, c[1]));
        best_pos = std::min(best_pos, std::hypot(c[0] - 3.0, c[1]));
    }
    CHECK(best_neg < 0.5);
    CHECK(best_pos < 0.5);

    // distortion within 10% of seeded k-means at the same K
    const BaselineResult km = oda::kmeans_fit(data, da.k, div, 17);
    const double d_da = da.distortion_curve.back().distortion;
    const double d_km = km.distortion_curve.back().distortion;
    CHECK(std::abs(d_da - d_km) <= 0.10 * d_km);
}

TEST_CASE("online annealing, batch DA and kmeans agree at equal K") {
    oda::MixtureSpec spec;
    spec.components = {{{-3.0, 0.0}, {0.5, 0.5}, 0.5, {}}, {{3.0, 0.0}, {0.5, 0.5}, 0.5, {}}};
    spec.count = 1200;
    const auto data = oda::synthesize_mixture(spec, 93);
    const auto pts = points_of(data);
    const Divergence div(DivergenceKind::SquaredEuclidean, 2);

    Schedule s;
    s.t_init = 40.0;
    s.t_min = 1.2;
    s.gamma = 0.7;
    s.k_max = 8;
    s.a = 2.0;
    s.eps_c = 2e-3;
    s.eps_n = 2e-3;
    s.delta = 0.05;
    s.max_obs_per_level = 15000;

    const BaselineResult da = oda::batch_da_fit(pts, s, div, 18);
    auto model = oda::OdaModel::init_clustering(div, s, pts.front(), 19);
    oda::ObservationSource stream = resample(pts, 20);
    oda::train(model, stream);
    const double d_online = oda::average_distortion(model, data);
    const double d_da = da.distortion_curve.back().distortion;
    const BaselineResult km = oda::kmeans_fit(pts, da.k, div, 18);
    const double d_km = km.distortion_curve.back().distortion;

    CHECK(std::abs(d_online - d_da) <= 0.10 * d_da);
    CHECK(std::abs(d_online - d_km) <= 0.10 * d_km);
    CHECK(std::abs(d_da - d_km) <= 0.10 * d_km);
}

TEST_CASE("svq approaches the kmeans floor on a 4-cluster mixture") {
    oda::MixtureSpec spec;
    spec.components = {{{0.0, 0.0}, {0.6, 0.6}, 0.25, {}},
                       {{6.0, 0.0}, {0.6, 0.6}, 0.25, {}},
                       {{0.0, 6.0}, {0.6, 0.6}, 0.25, {}},
                       {{6.0, 6.0}, {0.6, 0.6}, 0.25, {}}};
    spec.count = 2000;
    const auto data = points_of(oda::synthesize_mixture(spec, 92));
    const Divergence div(DivergenceKind::SquaredEuclidean, 2);
    const BaselineResult km = oda::kmeans_fit(data, 4, div, 29);
    const BaselineResult svq =
        oda::svq_fit(resample(data, 30), 100000, 4, 1.0, 0.05, div, data, 10000);
    const double floor = km.distortion_curve.back().distortion;
    CHECK(svq.distortion_curve.back().distortion <= 1.15 * floor);
}
