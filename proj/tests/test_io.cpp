#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "oda/io/config.hpp"
#include "oda/io/csv.hpp"
#include "oda/io/serialize.hpp"
#include "oda/io/synth.hpp"
#include "oda/rng.hpp"
#include "oda/tasks.hpp"

namespace fs = std::filesystem;
using oda::DivergenceKind;
using oda::SplitRng;
using oda::Vec;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = fs::temp_directory_path() / ("oda_io_test_" + std::to_string(counter++) + ".csv");
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_CASE("ingest_csv") {
    SUBCASE("unlabeled rows") {
        TempFile f("1.0,2.0\n3.0,4.0\n");
        const auto data = oda::ingest_csv(f.path, false);
        CHECK(data.rows.size() == 2);
        CHECK(data.dimension == 2);
        CHECK(data.rows[1].x == Vec{3.0, 4.0});
        CHECK(data.classes.empty());
    }
    SUBCASE("labeled with a header") {
        TempFile f("x1,x2,y\n1,2,A\n");
        const auto data = oda::ingest_csv(f.path, true);
        CHECK(data.rows.size() == 1);
        CHECK(data.dimension == 2);
        CHECK(*data.rows[0].label == "A");
        CHECK(data.classes.count("A") == 1);
    }
    SUBCASE("bad number reports its line") {
        TempFile f("1.0,oops\n");
        try {
            oda::ingest_csv(f.path, false);
            FAIL("expected ParseError");
        } catch (const oda::ParseError& e) {
            CHECK(std::string(e.what()).find("line 1") != std::string::npos);
        }
    }
    SUBCASE("empty file") {
        TempFile f("");
        CHECK_THROWS_AS(oda::ingest_csv(f.path, false), oda::EmptyFile);
        TempFile header_only("a,b\n");
        CHECK_THROWS_AS(oda::ingest_csv(header_only.path, false), oda::EmptyFile);
    }
    SUBCASE("ragged rows") {
        TempFile f("1,2\n1,2,3\n");
        CHECK_THROWS_AS(oda::ingest_csv(f.path, false), oda::RaggedRows);
    }
    SUBCASE("labels are taken verbatim") {
        TempFile f("0.5,weird label-7\n0.75,weird label-7\n");
        const auto data = oda::ingest_csv(f.path, true);
        CHECK(*data.rows[0].label == "weird label-7");
        CHECK(data.dimension == 1);
    }
}

TEST_CASE("format_double round-trips") {
    SplitRng rng(60);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-12, 12));
        const std::string s = oda::format_double(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("csv writer enforces its column count") {
    const fs::path p = fs::temp_directory_path() / "oda_csv_writer_test.csv";
    {
        oda::CsvWriter w(p, {"a", "b"});
        w.write_row({"1", "2"});
        CHECK_THROWS_AS(w.write_row({"1"}), oda::ConfigError);
    }
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    CHECK(line == "a,b");
    fs::remove(p);
}

TEST_CASE("synthesize_mixture") {
    SUBCASE("zero covariance repeats the mean") {
        oda::MixtureSpec spec;
        spec.components = {{{2.0, -1.0}, {0.0, 0.0}, 1.0, std::string("c")}};
        spec.count = 10;
        spec.labeled = true;
        const auto data = oda::synthesize_mixture(spec, 1);
        for (const auto& row : data.rows) {
            CHECK(row.x == Vec{2.0, -1.0});
            CHECK(*row.label == "c");
        }
    }
    SUBCASE("zero-weight components never fire") {
        oda::MixtureSpec spec;
        spec.components = {{{5.0}, {0.0}, 1.0, std::string("hot")},
                           {{-5.0}, {0.0}, 0.0, std::string("cold")}};
        spec.count = 200;
        spec.labeled = true;
        const auto data = oda::synthesize_mixture(spec, 2);
        for (const auto& row : data.rows) CHECK(*row.label == "hot");
    }
    SUBCASE("sample means concentrate near the spec means") {
        oda::MixtureSpec spec;
        spec.components = {{{-3.0, 0.0}, {1.0, 1.0}, 0.5, std::string("a")},
                           {{3.0, 0.0}, {1.0, 1.0}, 0.5, std::string("b")}};
        spec.count = 10000;
        spec.labeled = true;
        const auto data = oda::synthesize_mixture(spec, 3);
        double mean_a = 0.0, mean_b = 0.0;
        std::size_t n_a = 0, n_b = 0;
        for (const auto& row : data.rows) {
            if (*row.label == "a") {
                mean_a += row.x[0];
                ++n_a;
            } else {
                mean_b += row.x[0];
                ++n_b;
            }
        }
        CHECK(std::abs(mean_a / n_a + 3.0) < 0.1);
        CHECK(std::abs(mean_b / n_b - 3.0) < 0.1);
    }
    SUBCASE("weights must sum to one") {
        oda::MixtureSpec spec;
        spec.components = {{{0.0}, {1.0}, 0.7, {}}};
        spec.count = 5;
        CHECK_THROWS_AS(oda::synthesize_mixture(spec, 1), oda::SpecError);
    }
}

TEST_CASE("synthesize_circles") {
    oda::CirclesSpec spec;
    spec.rings = {{0.5, 1.0, 0.5, std::string("inner")}, {2.0, 0.5, 0.5, std::string("outer")}};
    spec.count = 2000;
    const auto data = oda::synthesize_circles(spec, 4);
    CHECK(data.dimension == 2);
    CHECK(data.classes.size() == 2);
    for (const auto& row : data.rows) {
        const double r = std::hypot(row.x[0], row.x[1]);
        if (*row.label == "inner") {
            CHECK(r <= 1.0 + 1e-12);
        } else {
            CHECK(r >= 1.75 - 1e-12);
            CHECK(r <= 2.25 + 1e-12);
        }
    }
}

TEST_CASE("model snapshot json round-trips bit-exactly") {
    SplitRng rng(61);
    std::vector<oda_test::ProtoSpec> protos;
    for (int i = 0; i < 6; ++i)
        protos.push_back({{rng.uniform(-5, 5), rng.uniform(-5, 5)},
                          rng.uniform(0.01, 0.5),
                          std::string(1, static_cast<char>('a' + i % 2))});
    auto m = oda_test::make_model(DivergenceKind::SquaredEuclidean, 2, 1.2345678901234567, protos);
    m.lower_temperature();

    const fs::path p = fs::temp_directory_path() / "oda_model_roundtrip.json";
    oda::save_model(m, p);
    const auto back = oda::load_model(p, 99);
    fs::remove(p);

    CHECK(back.temperature() == m.temperature());
    REQUIRE(back.prototype_count() == m.prototype_count());
    for (std::size_t i = 0; i < m.prototype_count(); ++i) {
        CHECK(back.prototypes()[i].mu == m.prototypes()[i].mu);
        CHECK(back.prototypes()[i].rho == m.prototypes()[i].rho);
        CHECK(back.prototypes()[i].label == m.prototypes()[i].label);
    }
    REQUIRE(back.history().size() == 1);
    CHECK(back.history()[0].temperature == m.history()[0].temperature);
    CHECK(back.history()[0].distortion == m.history()[0].distortion);

    // Loaded model reproduces predictions exactly.
    for (int i = 0; i < 200; ++i) {
        const Vec x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(oda::predict_class(back, x) == oda::predict_class(m, x));
        CHECK(oda::quantize(back, x) == oda::quantize(m, x));
    }
}

TEST_CASE("checkpoint json round-trips the aggregate") {
    const oda::JointEmbedding emb = oda::JointEmbedding::cartpole();
    auto model = oda_test::make_model(DivergenceKind::SquaredEuclidean, emb.dim(), 2.0,
                                      {{Vec(emb.dim(), 0.1), 0.5, {}}, {Vec(emb.dim(), -0.1), 0.5, {}}});
    oda::AggregateQ agg(std::move(model), emb);
    agg.mutable_q() = {1.25, -0.75};

    const fs::path p = fs::temp_directory_path() / "oda_checkpoint_roundtrip.json";
    oda::save_checkpoint(agg, p);
    const auto back = oda::load_checkpoint(p, 5);
    fs::remove(p);

    CHECK(back.q() == agg.q());
    CHECK(back.size() == 2);
    CHECK(back.embedding().state_half_range == emb.state_half_range);
    CHECK(back.aggregator().prototypes()[0].mu == agg.aggregator().prototypes()[0].mu);
}

TEST_CASE("config parsing") {
    SUBCASE("full cluster config") {
        const nlohmann::json j = {
            {"mode", "cluster"},
            {"divergence", "sq_euclidean"},
            {"seed", 42},
            {"schedule", {{"t_init", 32.0}, {"t_min", 2.5}, {"k_max", 16}, {"a", 2.0}}},
            {"synthetic",
             {{"kind", "mixture"},
              {"count", 100},
              {"components",
               {{{"mean", {0.0, 0.0}}, {"cov", 1.0}, {"weight", 1.0}}}}}}};
        const auto cfg = oda::config_from_json(j);
        CHECK(cfg.mode == oda::ExperimentMode::Cluster);
        CHECK(cfg.seed == 42);
        CHECK(cfg.schedule.t_init == 32.0);
        CHECK(cfg.t_init_override.has_value());
        REQUIRE(cfg.mixture.has_value());
        CHECK(cfg.mixture->components.size() == 1);
        CHECK(cfg.mixture->components[0].cov_diag == Vec{1.0, 1.0});
    }
    SUBCASE("lambda_init front-end maps to a temperature") {
        const nlohmann::json j = {{"mode", "cluster"},
                                  {"seed", 1},
                                  {"schedule", {{"lambda_init", 0.8}, {"t_min", 0.1}}},
                                  {"synthetic",
                                   {{"kind", "mixture"},
                                    {"count", 10},
                                    {"components",
                                     {{{"mean", {0.0}}, {"cov", 1.0}, {"weight", 1.0}}}}}}};
        const auto cfg = oda::config_from_json(j);
        CHECK(cfg.schedule.t_init == doctest::Approx(4.0).epsilon(1e-12));  // 0.8 / 0.2
    }
    SUBCASE("seed is mandatory") {
        const nlohmann::json j = {{"mode", "cluster"},
                                  {"synthetic",
                                   {{"kind", "mixture"},
                                    {"count", 10},
                                    {"components",
                                     {{{"mean", {0.0}}, {"cov", 1.0}, {"weight", 1.0}}}}}}};
        CHECK_THROWS_AS(oda::config_from_json(j), oda::ConfigError);
    }
    SUBCASE("unknown mode") {
        const nlohmann::json j = {{"mode", "regress"}, {"seed", 1}};
        CHECK_THROWS_AS(oda::config_from_json(j), oda::ConfigError);
    }
    SUBCASE("two data sources are rejected") {
        const nlohmann::json j = {
            {"mode", "cluster"},
            {"seed", 1},
            {"dataset", {{"path", "x.csv"}}},
            {"synthetic",
             {{"kind", "mixture"},
              {"count", 10},
              {"components", {{{"mean", {0.0}}, {"cov", 1.0}, {"weight", 1.0}}}}}}};
        CHECK_THROWS_AS(oda::config_from_json(j), oda::ConfigError);
    }
    SUBCASE("rl mode needs no dataset") {
        const nlohmann::json j = {{"mode", "rl_cartpole"}, {"seed", 3}};
        const auto cfg = oda::config_from_json(j);
        CHECK(cfg.rl.episodes == 2000);
        CHECK(cfg.rl.aggregator.k_max == 75);
    }
}
