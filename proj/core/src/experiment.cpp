#include "oda/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>

#include "oda/baselines.hpp"
#include "oda/io/csv.hpp"
#include "oda/io/serialize.hpp"

namespace oda {

namespace {

using Clock = std::chrono::steady_clock;

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("");
}

void write_levels_csv(const std::filesystem::path& path, const std::vector<LevelRecord>& history,
                      bool with_accuracy) {
    std::vector<std::string> header{"temperature", "lambda", "k", "distortion"};
    if (with_accuracy) header.push_back("accuracy");
    header.push_back("obs");
    header.push_back("forced_cutoff");
    CsvWriter csv(path, header);
    for (const auto& rec : history) {
        std::vector<std::string> row{format_double(rec.temperature),
                                     format_double(lambda_of_temperature(rec.temperature)),
                                     std::to_string(rec.k_effective),
                                     format_double(rec.distortion)};
        if (with_accuracy) row.push_back(opt_cell(rec.accuracy));
        row.push_back(std::to_string(rec.obs_used));
        row.push_back(rec.forced_cutoff ? "1" : "0");
        csv.write_row(row);
    }
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<DistortionPoint>& curve) {
    CsvWriter csv(path, {"observations", "distortion"});
    for (const auto& pt : curve)
        csv.write_row({std::to_string(pt.observations), format_double(pt.distortion)});
}

nlohmann::json schedule_meta(const Schedule& s) {
    return {{"gamma", s.gamma},       {"t_init", s.t_init},
            {"t_min", s.t_min},       {"k_max", s.k_max},
            {"a", s.a},               {"b", s.b},
            {"eps_c", s.eps_c},       {"eps_n", s.eps_n},
            {"eps_r", s.eps_r},       {"delta", s.delta},
            {"max_obs_per_level", s.max_obs_per_level},
            {"check_period", s.check_period},
            {"lambda_cooling", s.lambda_cooling}};
}

void write_meta(const std::filesystem::path& path, const nlohmann::json& meta) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << meta.dump(2) << '\n';
}

struct PreparedData {
    LabeledDataset train;
    LabeledDataset holdout;
    bool standardized = false;
    Standardizer standardizer;
    double var_estimate = 0.0;
};

PreparedData prepare_data(const ExperimentConfig& cfg) {
    PreparedData out;
    LabeledDataset data = load_experiment_data(cfg);

    const bool default_standardize =
        cfg.dataset_path.has_value() && cfg.divergence == "sq_euclidean";
    const bool standardize = cfg.standardize.value_or(default_standardize);
    if (standardize && cfg.divergence != "sq_euclidean")
        throw ConfigError("standardization produces negative coordinates; incompatible with " +
                          cfg.divergence);

    const double holdout = cfg.mode == ExperimentMode::Classify ? cfg.holdout_fraction : 0.0;
    auto [train, held] = split_holdout(data, holdout, SplitRng(cfg.seed).split("split"));
    out.train = std::move(train);
    out.holdout = std::move(held);

    if (standardize) {
        out.standardizer = Standardizer::fit(out.train.rows);
        out.standardizer.apply(out.train);
        if (!out.holdout.rows.empty()) out.standardizer.apply(out.holdout);
        out.standardized = true;
    }
    out.var_estimate = variance_estimate(out.train.rows);
    return out;
}

Schedule effective_schedule(const ExperimentConfig& cfg, const PreparedData& data) {
    Schedule s = cfg.schedule;
    const double var = std::max(data.var_estimate, 1e-12);
    if (!cfg.t_init_override) s.t_init = 3.0 * var * static_cast<double>(data.train.dimension);
    if (cfg.scale_tolerances) {
        // eps_c and eps_n compare temperature-weighted divergences, delta is a
        // length; eps_r is a dimensionless mass and stays as configured.
        s.eps_c *= var;
        s.eps_n *= var;
        s.delta *= std::sqrt(var);
    }
    validate(s);
    return s;
}

OdaModel init_model(const ExperimentConfig& cfg, const PreparedData& data, const Schedule& sched) {
    const Divergence div(parse_divergence_kind(cfg.divergence), data.train.dimension);
    const std::uint64_t model_seed = SplitRng(cfg.seed).split("model").next_u64();

    if (cfg.mode == ExperimentMode::Classify) {
        if (data.train.classes.empty())
            throw ConfigError("classification requires labeled training data");
        std::vector<std::pair<std::string, Vec>> inits;
        if (cfg.init.kind == InitSpec::Kind::Point) {
            for (const auto& cls : data.train.classes) inits.emplace_back(cls, cfg.init.point);
        } else {
            for (const auto& cls : data.train.classes) {
                for (const auto& row : data.train.rows) {
                    if (row.label == cls) {
                        inits.emplace_back(cls, row.x);
                        break;
                    }
                }
            }
        }
        return OdaModel::init_classification(div, sched, std::move(inits), model_seed);
    }

    Vec mu0 = cfg.init.kind == InitSpec::Kind::Point ? cfg.init.point : data.train.rows.front().x;
    return OdaModel::init_clustering(div, sched, std::move(mu0), model_seed);
}

nlohmann::json base_meta(const ExperimentConfig& cfg, const PreparedData& data,
                         const Schedule& sched) {
    nlohmann::json meta{{"mode", mode_token(cfg.mode)},
                        {"divergence", cfg.divergence},
                        {"seed", cfg.seed},
                        {"train_rows", data.train.rows.size()},
                        {"holdout_rows", data.holdout.rows.size()},
                        {"variance_estimate", data.var_estimate},
                        {"standardized", data.standardized},
                        {"schedule", schedule_meta(sched)}};
    if (data.standardized) {
        meta["standardizer"] = {{"mean", data.standardizer.mean},
                                {"stddev", data.standardizer.stddev}};
    }
    return meta;
}

void run_cluster_or_classify(const ExperimentConfig& cfg) {
    const auto t0 = Clock::now();
    PreparedData data = prepare_data(cfg);
    const Schedule sched = effective_schedule(cfg, data);
    OdaModel model = init_model(cfg, data, sched);

    const bool classify = cfg.mode == ExperimentMode::Classify;
    const LabeledDataset& eval_set =
        classify && !data.holdout.rows.empty() ? data.holdout : data.train;

    ObservationSource stream =
        make_resampling_stream(data.train, SplitRng(cfg.seed).split("stream"));
    const LevelHook hook = [&](const OdaModel& m, LevelRecord& rec) {
        rec.distortion = average_distortion(m, data.train);
        if (classify) rec.accuracy = accuracy(m, eval_set);
    };

    StopCriteria stop;
    stop.target_distortion = cfg.target_distortion;
    stop.max_levels = cfg.max_levels;
    const StopReason reason = train(model, stream, stop, hook);

    write_levels_csv(cfg.out_dir / "levels.csv", model.history(), classify);
    save_model(model, cfg.out_dir / "model.json");

    nlohmann::json meta = base_meta(cfg, data, sched);
    meta["stop_reason"] = stop_reason_name(reason);
    meta["levels"] = model.history().size();
    meta["k_final"] = model.prototype_count();
    meta["final_distortion"] =
        model.history().empty() ? 0.0 : model.history().back().distortion;
    if (classify && !model.history().empty() && model.history().back().accuracy)
        meta["final_accuracy"] = *model.history().back().accuracy;
    nlohmann::json walls = nlohmann::json::array();
    for (const auto& rec : model.history()) walls.push_back(rec.wall_ms);
    meta["level_wall_ms"] = std::move(walls);
    meta["total_wall_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    write_meta(cfg.out_dir / "run_meta.json", meta);
}

void run_compare_baselines(const ExperimentConfig& cfg) {
    const auto t0 = Clock::now();
    PreparedData data = prepare_data(cfg);
    const Schedule sched = effective_schedule(cfg, data);
    const Divergence div(parse_divergence_kind(cfg.divergence), data.train.dimension);

    std::vector<Vec> points;
    points.reserve(data.train.rows.size());
    for (const auto& row : data.train.rows) points.push_back(row.x);

    // Online annealing run; curve = cumulative observations vs per-level
    // distortion evaluated on the dataset.
    OdaModel model = init_model(cfg, data, sched);
    ObservationSource stream =
        make_resampling_stream(data.train, SplitRng(cfg.seed).split("stream"));
    std::vector<DistortionPoint> oda_curve;
    std::uint64_t oda_obs = 0;
    const LevelHook hook = [&](const OdaModel& m, LevelRecord& rec) {
        rec.distortion = average_distortion(m, data.train);
        oda_obs += rec.obs_used;
        oda_curve.push_back({oda_obs, rec.distortion});
    };
    StopCriteria stop;
    stop.max_levels = cfg.max_levels;
    train(model, stream, stop, hook);

    BaselineResult da = batch_da_fit(points, sched, div, cfg.seed);
    const std::size_t k_star = std::max<std::size_t>(1, da.k);

    BaselineResult km = kmeans_fit(points, std::min(k_star, points.size()), div, cfg.seed);

    ObservationSource svq_stream =
        make_resampling_stream(data.train, SplitRng(cfg.seed).split("svq_stream"));
    BaselineResult svq =
        svq_fit(svq_stream, cfg.baselines.svq_steps, std::min(k_star, points.size()),
                cfg.baselines.svq_a, cfg.baselines.svq_b, div, points, cfg.baselines.eval_period);

    write_levels_csv(cfg.out_dir / "levels.csv", model.history(), false);
    write_curve_csv(cfg.out_dir / "oda_curve.csv", oda_curve);
    write_curve_csv(cfg.out_dir / "batch_da_curve.csv", da.distortion_curve);
    write_curve_csv(cfg.out_dir / "kmeans_curve.csv", km.distortion_curve);
    write_curve_csv(cfg.out_dir / "svq_curve.csv", svq.distortion_curve);

    CsvWriter summary(cfg.out_dir / "summary.csv",
                      {"algorithm", "k", "final_distortion", "observations"});
    const auto add_row = [&](const std::string& name, std::size_t k,
                             const std::vector<DistortionPoint>& curve) {
        summary.write_row({name, std::to_string(k),
                           curve.empty() ? "" : format_double(curve.back().distortion),
                           curve.empty() ? "0" : std::to_string(curve.back().observations)});
    };
    add_row("oda", model.prototype_count(), oda_curve);
    add_row("batch_da", da.k, da.distortion_curve);
    add_row("kmeans", km.k, km.distortion_curve);
    add_row("svq", svq.k, svq.distortion_curve);

    nlohmann::json meta = base_meta(cfg, data, sched);
    meta["k_star"] = k_star;
    meta["wall_ms"] = {{"batch_da", da.wall_ms}, {"kmeans", km.wall_ms}, {"svq", svq.wall_ms}};
    meta["total_wall_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    write_meta(cfg.out_dir / "run_meta.json", meta);
}

// One greedy rollout recorded step by step.
template <typename Policy>
void write_trajectory_csv(const std::filesystem::path& path, const Policy& policy,
                          const PhysicsParams& params, SplitRng rng, std::size_t max_steps) {
    CsvWriter csv(path, {"t", "x", "theta", "x_dot", "theta_dot", "force", "failed"});
    CartPoleState s = reset_cartpole(rng);
    for (std::size_t t = 0; t < max_steps; ++t) {
        const Vec state{s.x, s.theta, s.x_dot, s.theta_dot};
        const double force = policy(state) == 0 ? -10.0 : 10.0;
        const CartPoleStep out = step_cartpole(s, force, params);
        csv.write_row({format_double(static_cast<double>(t) * params.tau), format_double(s.x),
                       format_double(s.theta), format_double(s.x_dot),
                       format_double(s.theta_dot), format_double(force),
                       out.failed ? "1" : "0"});
        if (out.failed) break;
        s = out.state;
    }
}

void run_rl_cartpole(const ExperimentConfig& cfg) {
    const auto t0 = Clock::now();
    validate(cfg.rl.timescales);
    SplitRng root(cfg.seed);
    SplitRng env_rng = root.split("env");
    SplitRng explore_rng = root.split("explore");
    const RlEnv env = make_cartpole_env(cfg.rl.physics, env_rng);
    const JointEmbedding embedding = JointEmbedding::cartpole();

    CsvWriter episodes(cfg.out_dir / "episodes.csv", {"episode", "steps", "cost", "k"});
    double eval_mean_steps = 0.0;
    std::size_t k_final = 0;

    if (cfg.rl.grid_bins > 0) {
        GridQ grid(embedding, cfg.rl.grid_bins);
        for (std::size_t ep = 0; ep < cfg.rl.episodes; ++ep) {
            const EpisodeStats stats =
                grid.train_episode(env, cfg.rl.timescales, cfg.rl.max_steps, explore_rng);
            episodes.write_row({std::to_string(ep), std::to_string(stats.steps),
                                format_double(stats.total_cost),
                                std::to_string(grid.n_states())});
        }
        SplitRng eval_rng = root.split("eval_env");
        const RlEnv eval_env = make_cartpole_env(cfg.rl.physics, eval_rng);
        for (std::size_t ep = 0; ep < cfg.rl.eval_episodes; ++ep)
            eval_mean_steps += static_cast<double>(grid.eval_episode(eval_env, cfg.rl.max_steps).steps);
        eval_mean_steps /= static_cast<double>(std::max<std::size_t>(1, cfg.rl.eval_episodes));
        k_final = grid.n_states();
        write_trajectory_csv(
            cfg.out_dir / "trajectory.csv",
            [&grid](const Vec& x) { return grid.greedy_action(x); }, cfg.rl.physics,
            root.split("trajectory"), cfg.rl.max_steps);
    } else {
        Schedule agg_sched = cfg.rl.aggregator;
        validate(agg_sched);
        const Divergence div(DivergenceKind::SquaredEuclidean, embedding.dim());
        // Codevectors start from a coarse uniform discretization of the joint
        // box; the annealing adapts their placement and count from there.
        std::vector<Vec> inits;
        if (cfg.rl.init_grid_bins > 0) {
            const std::size_t bins = cfg.rl.init_grid_bins;
            const std::size_t state_dims = embedding.state_half_range.size();
            std::size_t cells = 1;
            for (std::size_t d = 0; d < state_dims; ++d) cells *= bins;
            for (std::size_t cell = 0; cell < cells; ++cell) {
                Vec center(embedding.dim());
                std::size_t rem = cell;
                for (std::size_t d = 0; d < state_dims; ++d) {
                    const std::size_t bin = rem % bins;
                    rem /= bins;
                    center[d] = -1.0 + (2.0 * static_cast<double>(bin) + 1.0) /
                                          static_cast<double>(bins);
                }
                for (const double code : embedding.action_codes) {
                    center[state_dims] = code;
                    inits.push_back(center);
                }
            }
        } else {
            inits.push_back(Vec(embedding.dim(), 0.0));
        }
        OdaModel aggregator = OdaModel::init_clustering_many(
            div, agg_sched, std::move(inits), root.split("aggregator").next_u64());
        AggregateQ agg(std::move(aggregator), embedding);

        for (std::size_t ep = 0; ep < cfg.rl.episodes; ++ep) {
            const EpisodeStats stats =
                train_episode(env, agg, cfg.rl.timescales, cfg.rl.max_steps, explore_rng);
            episodes.write_row({std::to_string(ep), std::to_string(stats.steps),
                                format_double(stats.total_cost), std::to_string(agg.size())});
        }
        SplitRng eval_rng = root.split("eval_env");
        const RlEnv eval_env = make_cartpole_env(cfg.rl.physics, eval_rng);
        for (std::size_t ep = 0; ep < cfg.rl.eval_episodes; ++ep)
            eval_mean_steps += static_cast<double>(eval_episode(eval_env, agg, cfg.rl.max_steps).steps);
        eval_mean_steps /= static_cast<double>(std::max<std::size_t>(1, cfg.rl.eval_episodes));
        k_final = agg.size();
        save_checkpoint(agg, cfg.out_dir / "checkpoint.json");
        write_trajectory_csv(
            cfg.out_dir / "trajectory.csv",
            [&agg](const Vec& x) { return agg.greedy_action(x); }, cfg.rl.physics,
            root.split("trajectory"), cfg.rl.max_steps);
    }

    nlohmann::json meta{{"mode", mode_token(cfg.mode)},
                        {"seed", cfg.seed},
                        {"episodes", cfg.rl.episodes},
                        {"max_steps", cfg.rl.max_steps},
                        {"grid_bins", cfg.rl.grid_bins},
                        {"k_final", k_final},
                        {"eval_episodes", cfg.rl.eval_episodes},
                        {"eval_mean_steps", eval_mean_steps}};
    meta["total_wall_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    write_meta(cfg.out_dir / "run_meta.json", meta);
}

}  // namespace

Standardizer Standardizer::fit(const std::vector<Observation>& rows) {
    if (rows.empty()) throw ConfigError("cannot standardize an empty dataset");
    const std::size_t dim = rows.front().x.size();
    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.stddev.assign(dim, 0.0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < dim; ++i) s.mean[i] += row.x[i];
    for (auto& m : s.mean) m /= static_cast<double>(rows.size());
    for (const auto& row : rows)
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = row.x[i] - s.mean[i];
            s.stddev[i] += d * d;
        }
    for (auto& v : s.stddev) {
        v = std::sqrt(v / static_cast<double>(rows.size()));
        if (v < 1e-12) v = 1.0;  // constant columns pass through
    }
    return s;
}

void Standardizer::apply(LabeledDataset& data) const {
    for (auto& row : data.rows)
        for (std::size_t i = 0; i < row.x.size(); ++i)
            row.x[i] = (row.x[i] - mean[i]) / stddev[i];
}

LabeledDataset load_experiment_data(const ExperimentConfig& cfg) {
    if (cfg.dataset_path) {
        if (!std::filesystem::exists(*cfg.dataset_path))
            throw ParseError("dataset not found: " + cfg.dataset_path->string());
        return ingest_csv(*cfg.dataset_path, cfg.dataset_has_labels);
    }
    const std::uint64_t data_seed = SplitRng(cfg.seed).split("data").next_u64();
    if (cfg.mixture) return synthesize_mixture(*cfg.mixture, data_seed);
    if (cfg.circles) return synthesize_circles(*cfg.circles, data_seed);
    throw ConfigError("no data source configured");
}

std::pair<LabeledDataset, LabeledDataset> split_holdout(const LabeledDataset& data,
                                                        double fraction, SplitRng rng) {
    LabeledDataset train, holdout;
    train.dimension = holdout.dimension = data.dimension;
    if (fraction <= 0.0) {
        train = data;
        return {train, holdout};
    }
    std::vector<std::size_t> order(data.rows.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
    const auto n_holdout =
        static_cast<std::size_t>(fraction * static_cast<double>(data.rows.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        LabeledDataset& dst = i < n_holdout ? holdout : train;
        dst.rows.push_back(data.rows[order[i]]);
        if (data.rows[order[i]].label) dst.classes.insert(*data.rows[order[i]].label);
    }
    if (train.rows.empty()) throw ConfigError("holdout fraction leaves no training rows");
    return {train, holdout};
}

double variance_estimate(const std::vector<Observation>& rows) {
    if (rows.empty()) throw ConfigError("variance estimate over an empty dataset");
    const std::size_t dim = rows.front().x.size();
    Vec mean(dim, 0.0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < dim; ++i) mean[i] += row.x[i];
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    double total = 0.0;
    for (const auto& row : rows)
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = row.x[i] - mean[i];
            total += d * d;
        }
    return total / static_cast<double>(rows.size() * dim);
}

ObservationSource make_resampling_stream(const LabeledDataset& data, SplitRng rng) {
    if (data.rows.empty()) throw ConfigError("cannot stream from an empty dataset");
    // Rows are copied into the closure so the stream owns its data.
    return [rows = data.rows, rng]() mutable -> std::optional<Observation> {
        return rows[rng.uniform_index(rows.size())];
    };
}

void run_experiment_or_throw(const ExperimentConfig& cfg) {
    if (cfg.out_dir.empty()) throw ConfigError("output directory is required");
    std::filesystem::create_directories(cfg.out_dir);
    switch (cfg.mode) {
        case ExperimentMode::Cluster:
        case ExperimentMode::Classify: run_cluster_or_classify(cfg); break;
        case ExperimentMode::CompareBaselines: run_compare_baselines(cfg); break;
        case ExperimentMode::RlCartpole: run_rl_cartpole(cfg); break;
    }
}

int run_experiment(const ExperimentConfig& cfg) {
    try {
        run_experiment_or_throw(cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config/input error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace oda
