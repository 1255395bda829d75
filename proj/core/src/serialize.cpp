#include "oda/io/serialize.hpp"

#include <fstream>

namespace oda {

namespace {

constexpr int kSnapshotVersion = 1;

nlohmann::json schedule_to_json(const Schedule& s) {
    return {{"gamma", s.gamma},
            {"t_init", s.t_init},
            {"t_min", s.t_min},
            {"k_max", s.k_max},
            {"a", s.a},
            {"b", s.b},
            {"eps_c", s.eps_c},
            {"eps_n", s.eps_n},
            {"eps_r", s.eps_r},
            {"delta", s.delta},
            {"max_obs_per_level", s.max_obs_per_level},
            {"check_period", s.check_period},
            {"lambda_cooling", s.lambda_cooling},
            {"global_stepsize_index", s.global_stepsize_index}};
}

Schedule schedule_from_json(const nlohmann::json& j) {
    Schedule s;
    s.gamma = j.at("gamma").get<double>();
    s.t_init = j.at("t_init").get<double>();
    s.t_min = j.at("t_min").get<double>();
    s.k_max = j.at("k_max").get<std::size_t>();
    s.a = j.at("a").get<double>();
    s.b = j.at("b").get<double>();
    s.eps_c = j.at("eps_c").get<double>();
    s.eps_n = j.at("eps_n").get<double>();
    s.eps_r = j.at("eps_r").get<double>();
    s.delta = j.at("delta").get<double>();
    s.max_obs_per_level = j.at("max_obs_per_level").get<std::size_t>();
    s.check_period = j.at("check_period").get<std::size_t>();
    s.lambda_cooling = j.value("lambda_cooling", false);
    s.global_stepsize_index = j.value("global_stepsize_index", false);
    return s;
}

nlohmann::json record_to_json(const LevelRecord& r) {
    nlohmann::json j{{"temperature", r.temperature}, {"k_effective", r.k_effective},
                     {"distortion", r.distortion},   {"obs_used", r.obs_used},
                     {"wall_ms", r.wall_ms},         {"forced_cutoff", r.forced_cutoff}};
    if (r.accuracy) j["accuracy"] = *r.accuracy;
    return j;
}

LevelRecord record_from_json(const nlohmann::json& j) {
    LevelRecord r;
    r.temperature = j.at("temperature").get<double>();
    r.k_effective = j.at("k_effective").get<std::size_t>();
    r.distortion = j.at("distortion").get<double>();
    r.obs_used = j.at("obs_used").get<std::size_t>();
    r.wall_ms = j.value("wall_ms", 0.0);
    r.forced_cutoff = j.value("forced_cutoff", false);
    if (j.contains("accuracy")) r.accuracy = j.at("accuracy").get<double>();
    return r;
}

}  // namespace

nlohmann::json model_to_json(const OdaModel& model) {
    nlohmann::json protos = nlohmann::json::array();
    for (const auto& p : model.prototypes()) {
        nlohmann::json jp{{"mu", p.mu}, {"rho", p.rho}};
        jp["label"] = p.label ? nlohmann::json(*p.label) : nlohmann::json(nullptr);
        protos.push_back(std::move(jp));
    }
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& r : model.history()) hist.push_back(record_to_json(r));

    return {{"version", kSnapshotVersion},
            {"divergence",
             {{"kind", divergence_token(model.divergence().kind())},
              {"dimension", model.divergence().dimension()}}},
            {"temperature", model.temperature()},
            {"schedule", schedule_to_json(model.schedule())},
            {"level_index", model.level_index()},
            {"prototypes", std::move(protos)},
            {"history", std::move(hist)}};
}

OdaModel model_from_json(const nlohmann::json& j, std::uint64_t rng_seed) {
    if (j.value("version", 0) != kSnapshotVersion)
        throw ParseError("unsupported model snapshot version");
    const auto& jd = j.at("divergence");
    OdaModel::Snapshot snap{
        Divergence(parse_divergence_kind(jd.at("kind").get<std::string>()),
                   jd.at("dimension").get<std::size_t>()),
        schedule_from_json(j.at("schedule")),
        j.at("temperature").get<double>(),
        {},
        {},
        j.value("level_index", std::size_t{0})};
    for (const auto& jp : j.at("prototypes")) {
        Prototype p;
        p.mu = jp.at("mu").get<Vec>();
        p.rho = jp.at("rho").get<double>();
        if (!jp.at("label").is_null()) p.label = jp.at("label").get<std::string>();
        snap.prototypes.push_back(std::move(p));
    }
    for (const auto& jr : j.at("history")) snap.history.push_back(record_from_json(jr));
    return OdaModel::from_snapshot(std::move(snap), rng_seed);
}

void save_model(const OdaModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << model_to_json(model).dump(2) << '\n';
}

OdaModel load_model(const std::filesystem::path& path, std::uint64_t rng_seed) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return model_from_json(j, rng_seed);
}

nlohmann::json checkpoint_to_json(const AggregateQ& agg) {
    return {{"version", kSnapshotVersion},
            {"aggregator", model_to_json(agg.aggregator())},
            {"embedding",
             {{"state_half_range", agg.embedding().state_half_range},
              {"action_codes", agg.embedding().action_codes}}},
            {"q", agg.q()},
            {"visit_counts", agg.visit_counts()},
            {"steps_total", agg.steps_total()},
            {"annealing_done", agg.annealing_done()}};
}

AggregateQ checkpoint_from_json(const nlohmann::json& j, std::uint64_t rng_seed) {
    if (j.value("version", 0) != kSnapshotVersion)
        throw ParseError("unsupported checkpoint version");
    OdaModel aggregator = model_from_json(j.at("aggregator"), rng_seed);
    JointEmbedding embedding;
    embedding.state_half_range = j.at("embedding").at("state_half_range").get<Vec>();
    embedding.action_codes = j.at("embedding").at("action_codes").get<std::vector<double>>();
    AggregateQ::Snapshot snap{aggregator.to_snapshot(),
                              std::move(embedding),
                              j.at("q").get<std::vector<double>>(),
                              j.at("visit_counts").get<std::vector<std::uint64_t>>(),
                              j.at("steps_total").get<std::uint64_t>(),
                              j.value("annealing_done", false)};
    return AggregateQ::from_snapshot(std::move(snap), rng_seed);
}

void save_checkpoint(const AggregateQ& agg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << checkpoint_to_json(agg).dump(2) << '\n';
}

AggregateQ load_checkpoint(const std::filesystem::path& path, std::uint64_t rng_seed) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return checkpoint_from_json(j, rng_seed);
}

}  // namespace oda
