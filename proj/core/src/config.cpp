#include "oda/io/config.hpp"

#include <fstream>

namespace oda {

ExperimentMode parse_mode(const std::string& token) {
    if (token == "cluster") return ExperimentMode::Cluster;
    if (token == "classify") return ExperimentMode::Classify;
    if (token == "rl_cartpole") return ExperimentMode::RlCartpole;
    if (token == "compare_baselines") return ExperimentMode::CompareBaselines;
    throw ConfigError("unknown mode: " + token);
}

std::string mode_token(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::Cluster: return "cluster";
        case ExperimentMode::Classify: return "classify";
        case ExperimentMode::RlCartpole: return "rl_cartpole";
        case ExperimentMode::CompareBaselines: return "compare_baselines";
    }
    return "unknown";
}

namespace {

Vec json_vec(const nlohmann::json& j) { return j.get<Vec>(); }

Schedule schedule_from(const nlohmann::json& j, const Schedule& defaults) {
    Schedule s = defaults;
    s.gamma = j.value("gamma", s.gamma);
    if (j.contains("lambda_init")) {
        const double lam = j.at("lambda_init").get<double>();
        if (!(lam > 0.0 && lam < 1.0)) throw ConfigError("lambda_init must lie in (0,1)");
        s.t_init = lam / (1.0 - lam);
    } else {
        s.t_init = j.value("t_init", s.t_init);
    }
    s.t_min = j.value("t_min", s.t_min);
    s.k_max = j.value("k_max", s.k_max);
    s.a = j.value("a", s.a);
    s.b = j.value("b", s.b);
    s.eps_c = j.value("eps_c", s.eps_c);
    s.eps_n = j.value("eps_n", s.eps_n);
    s.eps_r = j.value("eps_r", s.eps_r);
    s.delta = j.value("delta", s.delta);
    s.max_obs_per_level = j.value("max_obs_per_level", s.max_obs_per_level);
    s.check_period = j.value("check_period", s.check_period);
    s.lambda_cooling = j.value("lambda_cooling", s.lambda_cooling);
    s.global_stepsize_index = j.value("global_stepsize_index", s.global_stepsize_index);
    return s;
}

MixtureSpec mixture_from(const nlohmann::json& j, bool labeled) {
    MixtureSpec spec;
    spec.count = j.at("count").get<std::size_t>();
    spec.labeled = labeled;
    for (const auto& jc : j.at("components")) {
        MixtureComponent c;
        c.mean = json_vec(jc.at("mean"));
        if (jc.contains("cov")) {
            if (jc.at("cov").is_number()) {
                c.cov_diag.assign(c.mean.size(), jc.at("cov").get<double>());
            } else {
                c.cov_diag = json_vec(jc.at("cov"));
            }
        } else {
            c.cov_diag.assign(c.mean.size(), 1.0);
        }
        c.weight = jc.at("weight").get<double>();
        if (jc.contains("label")) c.label = jc.at("label").get<std::string>();
        spec.components.push_back(std::move(c));
    }
    return spec;
}

CirclesSpec circles_from(const nlohmann::json& j, bool labeled) {
    CirclesSpec spec;
    spec.count = j.at("count").get<std::size_t>();
    spec.labeled = labeled;
    if (j.contains("center")) spec.center = json_vec(j.at("center"));
    for (const auto& jr : j.at("rings")) {
        RingComponent r;
        r.radius = jr.at("radius").get<double>();
        r.width = jr.value("width", 0.2);
        r.weight = jr.at("weight").get<double>();
        if (jr.contains("label")) r.label = jr.at("label").get<std::string>();
        spec.rings.push_back(std::move(r));
    }
    return spec;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.mode = parse_mode(j.at("mode").get<std::string>());
    cfg.divergence = j.value("divergence", std::string("sq_euclidean"));
    parse_divergence_kind(cfg.divergence);  // fail fast on bad tokens
    if (!j.contains("seed")) throw ConfigError("seed is mandatory: every run must be reproducible");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();

    if (j.contains("schedule")) {
        cfg.schedule = schedule_from(j.at("schedule"), cfg.schedule);
        if (j.at("schedule").contains("t_init") || j.at("schedule").contains("lambda_init"))
            cfg.t_init_override = cfg.schedule.t_init;
        cfg.scale_tolerances = j.at("schedule").value("scale_tolerances", cfg.scale_tolerances);
    }

    const bool labeled_mode = cfg.mode == ExperimentMode::Classify;
    if (j.contains("dataset")) {
        cfg.dataset_path = j.at("dataset").at("path").get<std::string>();
        cfg.dataset_has_labels = j.at("dataset").value("has_labels", labeled_mode);
    }
    if (j.contains("synthetic")) {
        const auto& js = j.at("synthetic");
        const std::string kind = js.value("kind", std::string("mixture"));
        if (kind == "mixture") {
            cfg.mixture = mixture_from(js, labeled_mode);
        } else if (kind == "circles") {
            cfg.circles = circles_from(js, labeled_mode);
        } else {
            throw ConfigError("unknown synthetic kind: " + kind);
        }
    }

    if (j.contains("standardize")) cfg.standardize = j.at("standardize").get<bool>();
    cfg.holdout_fraction = j.value("holdout_fraction", cfg.holdout_fraction);
    if (!(cfg.holdout_fraction >= 0.0 && cfg.holdout_fraction < 1.0))
        throw ConfigError("holdout_fraction must lie in [0,1)");

    if (j.contains("init")) {
        const auto& ji = j.at("init");
        const std::string kind = ji.value("kind", std::string("first_sample"));
        if (kind == "first_sample") {
            cfg.init.kind = InitSpec::Kind::FirstSample;
        } else if (kind == "point") {
            cfg.init.kind = InitSpec::Kind::Point;
            cfg.init.point = json_vec(ji.at("mu"));
        } else {
            throw ConfigError("unknown init kind: " + kind);
        }
    }
    if (j.contains("max_levels")) cfg.max_levels = j.at("max_levels").get<std::size_t>();
    if (j.contains("target_distortion"))
        cfg.target_distortion = j.at("target_distortion").get<double>();

    if (j.contains("rl")) {
        const auto& jr = j.at("rl");
        auto& rl = cfg.rl;
        rl.episodes = jr.value("episodes", rl.episodes);
        rl.max_steps = jr.value("max_steps", rl.max_steps);
        rl.eval_episodes = jr.value("eval_episodes", rl.eval_episodes);
        rl.grid_bins = jr.value("grid_bins", rl.grid_bins);
        rl.init_grid_bins = jr.value("init_grid_bins", rl.init_grid_bins);
        rl.timescales.discount = jr.value("discount", rl.timescales.discount);
        rl.timescales.fast_power = jr.value("fast_power", rl.timescales.fast_power);
        rl.timescales.slow_power = jr.value("slow_power", rl.timescales.slow_power);
        rl.timescales.n_period = jr.value("n_period", rl.timescales.n_period);
        rl.timescales.n_period_doubles =
            jr.value("n_period_doubles", rl.timescales.n_period_doubles);
        rl.timescales.explore_min = jr.value("explore_min", rl.timescales.explore_min);
        rl.timescales.explore_scale = jr.value("explore_scale", rl.timescales.explore_scale);
        rl.timescales.per_aggregate_explore =
            jr.value("per_aggregate_explore", rl.timescales.per_aggregate_explore);
        if (jr.contains("aggregator"))
            rl.aggregator = schedule_from(jr.at("aggregator"), rl.aggregator);
        if (jr.contains("physics")) {
            const auto& jp = jr.at("physics");
            auto& ph = rl.physics;
            ph.g = jp.value("g", ph.g);
            ph.m_c = jp.value("m_c", ph.m_c);
            ph.m = jp.value("m", ph.m);
            ph.l = jp.value("l", ph.l);
            ph.mu_c = jp.value("mu_c", ph.mu_c);
            ph.mu_p = jp.value("mu_p", ph.mu_p);
            ph.tau = jp.value("tau", ph.tau);
        }
    }

    if (j.contains("baselines")) {
        const auto& jb = j.at("baselines");
        cfg.baselines.svq_steps = jb.value("svq_steps", cfg.baselines.svq_steps);
        cfg.baselines.eval_period = jb.value("eval_period", cfg.baselines.eval_period);
        cfg.baselines.svq_a = jb.value("svq_a", cfg.baselines.svq_a);
        cfg.baselines.svq_b = jb.value("svq_b", cfg.baselines.svq_b);
    }

    const bool needs_data = cfg.mode != ExperimentMode::RlCartpole;
    const int sources = (cfg.dataset_path ? 1 : 0) + (cfg.mixture ? 1 : 0) + (cfg.circles ? 1 : 0);
    if (needs_data && sources != 1)
        throw ConfigError("exactly one data source (dataset | synthetic) is required");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad config " + path.string() + ": " + e.what());
    }
}

}  // namespace oda
