#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oda/divergence.hpp"
#include "oda/rng.hpp"
#include "oda/schedule.hpp"

namespace oda {

// One codevector with its mass estimate rho and un-normalized centroid
// accumulator sigma; mu == sigma / rho holds whenever the prototype is read.
struct Prototype {
    Vec mu;
    std::optional<std::string> label;
    double rho = 1.0;
    Vec sigma;
};

struct Observation {
    Vec x;
    std::optional<std::string> label;
};

struct LevelRecord {
    double temperature = 0.0;
    std::size_t k_effective = 0;
    double distortion = 0.0;  // prequential mean of min-divergence over the level
    std::size_t obs_used = 0;
    double wall_ms = 0.0;
    bool forced_cutoff = false;
    std::optional<double> accuracy;  // filled by the harness in classification runs
};

// Describes how prototype indices moved through a resize operation, so that
// side tables (Q-values, visit counts) can be remapped.
struct ResizeLog {
    static constexpr std::size_t kRemoved = static_cast<std::size_t>(-1);

    // perturb: parent (old index) of each new prototype.
    std::vector<std::size_t> parent_of_new;

    // merge_effective / remove_idle: for each old index, its new index or
    // kRemoved. For merges, absorbed_into[i] holds the old index of the
    // survivor that received prototype i's mass (== i when it survived), and
    // old_rho holds the pre-merge masses for weighted remaps.
    std::vector<std::size_t> new_index_of_old;
    std::vector<std::size_t> absorbed_into;
    std::vector<double> old_rho;
};

struct Counters {
    std::uint64_t observations = 0;
    std::uint64_t distance_evals = 0;
    std::uint64_t merge_comparisons = 0;
};

// Online deterministic annealing state: a growing prototype set trained by
// gradient-free stochastic approximation under a cooling schedule.
// Single-writer; copies are independent snapshots.
class OdaModel {
public:
    static OdaModel init_clustering(Divergence divergence, Schedule schedule, Vec mu0,
                                    std::uint64_t rng_seed);

    // Starts from a prescribed codevector set with uniform masses, e.g. a
    // coarse uniform discretization of the domain.
    static OdaModel init_clustering_many(Divergence divergence, Schedule schedule,
                                         std::vector<Vec> mu0s, std::uint64_t rng_seed);

    // One prototype per class. Masses start uniform across classes.
    static OdaModel init_classification(Divergence divergence, Schedule schedule,
                                        std::vector<std::pair<std::string, Vec>> class_inits,
                                        std::uint64_t rng_seed);

    const Divergence& divergence() const { return divergence_; }
    const Schedule& schedule() const { return schedule_; }
    double temperature() const { return temperature_; }
    bool classification_mode() const { return classification_; }
    std::size_t prototype_count() const { return prototypes_.size(); }
    const std::vector<Prototype>& prototypes() const { return prototypes_; }
    std::size_t obs_count_level() const { return obs_count_level_; }
    std::uint64_t obs_count_total() const { return obs_count_total_; }
    std::size_t level_index() const { return level_index_; }
    const std::vector<LevelRecord>& history() const { return history_; }
    LevelRecord& history_back() { return history_.back(); }
    const Counters& counters() const { return counters_; }
    bool below_t_min() const { return temperature_ < schedule_.t_min; }

    std::vector<Vec> snapshot_mus() const;
    double total_mass() const;

    // Gibbs association probabilities of x against the current prototypes,
    // computed with max-subtraction in the exponent.
    Vec gibbs_memberships(const Vec& x) const;

    // One stochastic-approximation step on (rho, sigma) with memberships taken
    // against the pre-update prototypes. Throws NumericalError if any mass is
    // driven to zero (stepsize misconfiguration).
    void sa_update(const Observation& obs);

    // True once every prototype satisfies T * d(mu_now, mu_prev) < eps_c, or
    // unconditionally once the level hit max_obs_per_level (forced cutoff,
    // flagged in the level record).
    bool check_convergence(const std::vector<Vec>& previous_mus);

    // Replaces every prototype by a pair at mu +/- delta*u and, in
    // classification mode, spawns one extra perturbed prototype per class from
    // the class's most massive prototype. Starts a new level.
    void perturb(ResizeLog* log = nullptr);

    // Discards prototype i when T * d(mu_j, mu_i) < eps_n for some j < i with
    // a compatible label; the survivor absorbs the discarded mass.
    void merge_effective(ResizeLog* log = nullptr);

    // Drops prototypes with rho < eps_r, never dropping the last prototype
    // (or the last prototype of a class); survivors are renormalized.
    void remove_idle(ResizeLog* log = nullptr);

    // Closes the level: appends its record to the history and cools T.
    void lower_temperature();

    // Serialization support. The perturbation RNG stream is not part of a
    // snapshot; restored models draw from a fresh seeded stream.
    struct Snapshot {
        Divergence divergence;
        Schedule schedule;
        double temperature;
        std::vector<Prototype> prototypes;
        std::vector<LevelRecord> history;
        std::size_t level_index;
    };
    Snapshot to_snapshot() const;
    static OdaModel from_snapshot(Snapshot snap, std::uint64_t rng_seed);

private:
    OdaModel(Divergence divergence, Schedule schedule, std::uint64_t rng_seed);

    // Divergences from x to every prototype.
    void distances_to(const Vec& x, Vec& out) const;
    Vec memberships_from_distances(const Vec& d) const;
    void renormalize_mass();
    void start_level_tracking();

    Divergence divergence_;
    Schedule schedule_;
    std::vector<Prototype> prototypes_;
    double temperature_;
    bool classification_ = false;
    std::size_t obs_count_level_ = 0;
    std::uint64_t obs_count_total_ = 0;
    std::size_t level_index_ = 0;
    std::vector<LevelRecord> history_;
    SplitRng rng_;

    bool forced_cutoff_ = false;
    double level_distortion_sum_ = 0.0;
    std::size_t level_distortion_n_ = 0;
    double level_wall_ms_ = 0.0;
    std::int64_t level_start_ns_ = 0;
    mutable Counters counters_;
};

}  // namespace oda
