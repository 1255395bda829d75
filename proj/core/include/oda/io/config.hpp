#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "oda/envs/cartpole.hpp"
#include "oda/io/synth.hpp"
#include "oda/rl.hpp"
#include "oda/schedule.hpp"

namespace oda {

enum class ExperimentMode { Cluster, Classify, RlCartpole, CompareBaselines };

ExperimentMode parse_mode(const std::string& token);
std::string mode_token(ExperimentMode mode);

struct InitSpec {
    enum class Kind { FirstSample, Point } kind = Kind::FirstSample;
    Vec point;
};

// The embedded joint space is dimensionless with coordinates around [-1, 1],
// so the aggregator's annealing constants are absolute. Tolerances are tight
// enough that only coincident perturbation twins merge, and the forced level
// cutoff paces every level to a fixed observation budget.
inline Schedule default_rl_aggregator_schedule() {
    Schedule s;
    s.t_init = 0.3;   // below the coarse structure the grid init encodes
    s.t_min = 2e-3;
    s.k_max = 75;
    s.eps_c = 1e-6;
    s.eps_n = 5e-7;
    s.eps_r = 1e-4;
    s.delta = 0.05;
    s.check_period = 40;
    s.max_obs_per_level = 1200;
    s.global_stepsize_index = true;
    return s;
}

struct RlConfig {
    TwoTimescaleSchedule timescales;
    Schedule aggregator = default_rl_aggregator_schedule();
    std::size_t episodes = 2000;
    std::size_t max_steps = 200;
    std::size_t eval_episodes = 20;
    std::size_t grid_bins = 0;       // > 0 switches to the uniform-grid baseline
    std::size_t init_grid_bins = 2;  // aggregator starts from this coarse joint grid
    PhysicsParams physics;
};

struct BaselineConfig {
    std::size_t svq_steps = 100000;
    std::size_t eval_period = 1000;
    double svq_a = 1.0;
    double svq_b = 1.0;
};

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::Cluster;
    std::string divergence = "sq_euclidean";
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;

    Schedule schedule;
    bool scale_tolerances = true;  // eps_c, eps_n, delta scaled by data statistics
    std::optional<double> t_init_override;  // explicit t_init (otherwise 6 * variance estimate)

    // Exactly one data source.
    std::optional<std::filesystem::path> dataset_path;
    bool dataset_has_labels = false;
    std::optional<MixtureSpec> mixture;
    std::optional<CirclesSpec> circles;

    std::optional<bool> standardize;  // default: on for CSV datasets, off for synthetic
    double holdout_fraction = 0.2;    // classification train/test split
    InitSpec init;
    std::optional<std::size_t> max_levels;
    std::optional<double> target_distortion;

    RlConfig rl;
    BaselineConfig baselines;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace oda
