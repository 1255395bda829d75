#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "oda/rng.hpp"
#include "oda/tasks.hpp"

using oda::DivergenceKind;
using oda::LabeledDataset;
using oda::Observation;
using oda::SplitRng;
using oda::Vec;
using oda_test::make_model;
using oda_test::ProtoSpec;

namespace {

LabeledDataset dataset_of(std::vector<Observation> rows) {
    LabeledDataset d;
    d.dimension = rows.empty() ? 0 : rows.front().x.size();
    for (auto& r : rows) {
        if (r.label) d.classes.insert(*r.label);
        d.rows.push_back(std::move(r));
    }
    return d;
}

}  // namespace

TEST_CASE("quantize") {
    auto m = make_model(DivergenceKind::SquaredEuclidean, 2, 1.0,
                        {{{0.0, 0.0}, 0.5, {}}, {{10.0, 10.0}, 0.5, {}}});
    CHECK(oda::quantize(m, {1.0, 1.0}) == 0);
    CHECK(oda::quantize(m, {5.0, 5.0}) == 0);  // equidistant, lowest index wins
    auto single = make_model(DivergenceKind::SquaredEuclidean, 2, 1.0, {{{3.0, 3.0}, 1.0, {}}});
    CHECK(oda::quantize(single, {-100.0, 40.0}) == 0);
}

TEST_CASE("predict_class") {
    SUBCASE("dominated by the zero-distance prototype") {
        auto m = make_model(DivergenceKind::SquaredEuclidean, 1, 0.5,
                            {{{0.0}, 0.5, std::string("A")}, {{4.0}, 0.5, std::string("B")}});
        CHECK(oda::predict_class(m, {0.0}) == "A");
        CHECK(oda::predict_class(m, {4.0}) == "B");
    }
    SUBCASE("equal distances resolved by larger prior mass") {
        auto m = make_model(DivergenceKind::SquaredEuclidean, 1, 1.0,
                            {{{-1.0}, 0.7, std::string("A")}, {{1.0}, 0.3, std::string("B")}});
        CHECK(oda::predict_class(m, {0.0}) == "A");
    }
    SUBCASE("single class") {
        auto m = make_model(DivergenceKind::SquaredEuclidean, 1, 1.0,
                            {{{0.0}, 1.0, std::string("only")}});
        CHECK(oda::predict_class(m, {123.0}) == "only");
    }
    SUBCASE("unlabeled prototypes are rejected") {
        auto m = make_model(DivergenceKind::SquaredEuclidean, 1, 1.0,
                            {{{0.0}, 0.5, std::string("A")}, {{1.0}, 0.5, {}}});
        CHECK_THROWS_AS(oda::predict_class(m, {0.0}), oda::UntrainedModel);
    }
}

TEST_CASE("average_distortion") {
    auto m = make_model(DivergenceKind::SquaredEuclidean, 1, 1.0,
                        {{{0.0}, 0.5, {}}, {{2.0}, 0.5, {}}});
    SUBCASE("zero at the prototype locations") {
        CHECK(oda::average_distortion(m, dataset_of({{{0.0}, {}}, {{2.0}, {}}})) == 0.0);
    }
    SUBCASE("two points around a single center") {
        auto single = make_model(DivergenceKind::SquaredEuclidean, 1, 1.0, {{{1.0}, 1.0, {}}});
        CHECK(oda::average_distortion(single, dataset_of({{{0.0}, {}}, {{2.0}, {}}})) == 1.0);
    }
    SUBCASE("K=1 equals the brute-force mean squared distance") {
        auto single = make_model(DivergenceKind::SquaredEuclidean, 2, 1.0,
                                 {{{0.5, -0.5}, 1.0, {}}});
        SplitRng rng(10);
        std::vector<Observation> rows;
        double expected = 0.0;
        for (int i = 0; i < 64; ++i) {
            const Vec x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
            expected += (x[0] - 0.5) * (x[0] - 0.5) + (x[1] + 0.5) * (x[1] + 0.5);
            rows.push_back({x, {}});
        }
        expected /= 64.0;
        CHECK(oda::average_distortion(single, dataset_of(rows)) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("empty data is rejected") {
        CHECK_THROWS_AS(oda::average_distortion(m, dataset_of({})), oda::ConfigError);
    }
}

TEST_CASE("accuracy") {
    SUBCASE("separable data with a prototype at each class mean") {
        auto m = make_model(DivergenceKind::SquaredEuclidean, 1, 0.1,
                            {{{-3.0}, 0.5, std::string("A")}, {{3.0}, 0.5, std::string("B")}});
        std::vector<Observation> rows;
        SplitRng rng(20);
        for (int i = 0; i < 100; ++i) {
            rows.push_back({{-3.0 + 0.3 * rng.normal()}, std::string("A")});
            rows.push_back({{3.0 + 0.3 * rng.normal()}, std::string("B")});
        }
        CHECK(oda::accuracy(m, dataset_of(rows)) == 1.0);
    }
    SUBCASE("random labels score about one half") {
        auto m = make_model(DivergenceKind::SquaredEuclidean, 1, 0.5,
                            {{{-1.0}, 0.5, std::string("A")}, {{1.0}, 0.5, std::string("B")}});
        SplitRng rng(21);
        std::vector<Observation> rows;
        for (int i = 0; i < 1000; ++i)
            rows.push_back({{rng.uniform(-2, 2)},
                            std::string(rng.uniform() < 0.5 ? "A" : "B")});
        const double acc = oda::accuracy(m, dataset_of(rows));
        CHECK(acc > 0.45);
        CHECK(acc < 0.55);
    }
    SUBCASE("disjoint class sets score zero") {
        auto m = make_model(DivergenceKind::SquaredEuclidean, 1, 0.5,
                            {{{0.0}, 1.0, std::string("A")}});
        CHECK(oda::accuracy(m, dataset_of({{{0.0}, std::string("B")}})) == 0.0);
    }
}

TEST_CASE("prediction at vanishing temperature matches quantization") {
    SplitRng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ProtoSpec> protos;
        for (int i = 0; i < 4; ++i)
            protos.push_back({{rng.uniform(-5, 5), rng.uniform(-5, 5)}, 0.25,
                              std::string(1, static_cast<char>('a' + i))});
        auto m = make_model(DivergenceKind::SquaredEuclidean, 2, 1e-6, protos);
        const Vec x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(oda::predict_class(m, x) == *m.prototypes()[oda::quantize(m, x)].label);
    }
}

TEST_CASE("adding a prototype at a data point never increases distortion") {
    SplitRng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Observation> rows;
        for (int i = 0; i < 50; ++i) rows.push_back({{rng.uniform(-3, 3), rng.uniform(-3, 3)}, {}});
        const auto data = dataset_of(rows);

        std::vector<ProtoSpec> protos{{{rng.uniform(-3, 3), rng.uniform(-3, 3)}, 0.5, {}}};
        auto before = make_model(DivergenceKind::SquaredEuclidean, 2, 1.0, protos);
        const double d_before = oda::average_distortion(before, data);

        protos.push_back({rows[rng.uniform_index(rows.size())].x, 0.5, {}});
        auto after = make_model(DivergenceKind::SquaredEuclidean, 2, 1.0, protos);
        const double d_after = oda::average_distortion(after, data);
        CHECK(d_after <= d_before + 1e-12);
    }
}

TEST_CASE("metrics are invariant under prototype permutation") {
    SplitRng rng(24);
    std::vector<ProtoSpec> protos;
    for (int i = 0; i < 5; ++i)
        protos.push_back({{rng.uniform(-4, 4), rng.uniform(-4, 4)},
                          0.2,
                          std::string(1, static_cast<char>('p' + i))});
    std::vector<ProtoSpec> reversed(protos.rbegin(), protos.rend());

    auto m1 = make_model(DivergenceKind::SquaredEuclidean, 2, 0.7, protos);
    auto m2 = make_model(DivergenceKind::SquaredEuclidean, 2, 0.7, reversed);

    std::vector<Observation> rows;
    for (int i = 0; i < 200; ++i) {
        const Vec x{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        rows.push_back({x, std::string(1, static_cast<char>('p' + rng.uniform_index(5)))});
    }
    const auto data = dataset_of(rows);
    CHECK(oda::average_distortion(m1, data) ==
          doctest::Approx(oda::average_distortion(m2, data)).epsilon(1e-12));
    CHECK(oda::accuracy(m1, data) == doctest::Approx(oda::accuracy(m2, data)).epsilon(1e-12));
}
