#pragma once

#include <cstdint>
#include <functional>
#include <tuple>
#include <vector>

#include "oda/model.hpp"

namespace oda {

// Maps a (state, action-index) pair into the joint space the aggregator
// clusters: state coordinates divided by their half-ranges, plus one slot
// carrying the action code.
struct JointEmbedding {
    Vec state_half_range;
    std::vector<double> action_codes;

    std::size_t dim() const { return state_half_range.size() + 1; }
    std::size_t n_actions() const { return action_codes.size(); }

    Vec embed(const Vec& state, std::size_t action) const;

    // Cart-pole convention: (x, theta, x_dot, theta_dot) scaled by the
    // half-ranges of [-1,1]x[-4,4]x[-1,1]x[-4,4], actions {-10,+10} N
    // embedded as -1/+1.
    static JointEmbedding cartpole();
};

// Fast/slow stepsize pair plus exploration for the two-timescale loop.
// alpha drives the Q updates, beta documents the slow (aggregation) scale;
// the aggregator's own 1/(a+bn) schedule realizes it, together with the
// update period.
struct TwoTimescaleSchedule {
    double fast_power = 2.0 / 3.0;  // alpha_n = (1+n)^(-fast_power)
    double slow_power = 1.0;        // beta_n  = (1+n)^(-slow_power)
    double discount = 0.95;
    std::size_t n_period = 100;     // slow update every n_period fast steps
    bool n_period_doubles = true;   // period doubles at each temperature level
    std::size_t n_period_max_doublings = 3;  // cap so the slow loop is never starved
    double explore_min = 0.05;
    double explore_scale = 5000.0;  // eps_n = max(explore_min, 1/(1+n/explore_scale))

    // When true, the exploration rate of a step depends on how often the
    // current aggregate has been visited (explore_scale then counts visits),
    // so rarely seen regions keep exploring while settled ones exploit.
    bool per_aggregate_explore = false;
};

double fast_stepsize(const TwoTimescaleSchedule& s, std::uint64_t n);
double slow_stepsize(const TwoTimescaleSchedule& s, std::uint64_t n);
double explore_rate(const TwoTimescaleSchedule& s, std::uint64_t n);
void validate(const TwoTimescaleSchedule& s);

// Joint state-action prototypes paired with one tabular Q value per
// prototype. The aggregator anneals on the slow timescale; Q entries are
// remapped across every resize so |q| == K at all times.
class AggregateQ {
public:
    AggregateQ(OdaModel aggregator, JointEmbedding embedding);

    const OdaModel& aggregator() const { return aggregator_; }
    const JointEmbedding& embedding() const { return embedding_; }
    const std::vector<double>& q() const { return q_; }
    std::vector<double>& mutable_q() { return q_; }
    const std::vector<std::uint64_t>& visit_counts() const { return visits_; }
    std::uint64_t steps_total() const { return steps_total_; }
    std::size_t size() const { return q_.size(); }
    bool annealing_done() const { return annealing_done_; }

    std::size_t nearest(const Vec& state, std::size_t action) const;
    std::size_t nearest_embedded(const Vec& embedded) const;

    // min over actions u of q[nearest(x_next, u)].
    double min_next_value(const Vec& state_next) const;

    // Q(h) moves toward cost + discount * min_u Q(h'(x', u)) with stepsize
    // alpha(n); terminal transitions bootstrap from zero.
    void q_update(std::size_t h, const Vec& state_next, double cost,
                  const TwoTimescaleSchedule& sched, std::uint64_t n, bool terminal);

    // Epsilon-greedy over the action set; greedy ties break to the first
    // action in canonical (index) order.
    std::size_t select_action(const Vec& state, double explore, SplitRng& rng) const;
    std::size_t greedy_action(const Vec& state) const;

    // Feeds buffered joint embeddings through the aggregator at its current
    // temperature, driving the level machinery (merge/idle/cool/perturb) when
    // a level converges; Q values and visit counts are remapped across every
    // resize. No-op once annealing finished (t_min or k_max reached).
    void slow_update(const std::vector<Vec>& buffer);

    // Buffers one joint observation; once n_period embeddings accumulated
    // (the period doubles with each aggregator temperature level), flushes
    // them through slow_update. The buffer persists across episodes.
    void buffer_joint(const Vec& state, std::size_t action, const TwoTimescaleSchedule& sched);

    // Advances the fast step counter; train_episode owns this.
    void count_step() { ++steps_total_; }

    // Serialization support.
    struct Snapshot {
        OdaModel::Snapshot aggregator;
        JointEmbedding embedding;
        std::vector<double> q;
        std::vector<std::uint64_t> visits;
        std::uint64_t steps_total;
        bool annealing_done;
    };
    Snapshot to_snapshot() const;
    static AggregateQ from_snapshot(Snapshot snap, std::uint64_t rng_seed);

private:
    void apply_perturb_log(const ResizeLog& log);
    void apply_merge_log(const ResizeLog& log);
    void apply_removal_log(const ResizeLog& log);

    OdaModel aggregator_;
    JointEmbedding embedding_;
    std::vector<double> q_;
    std::vector<std::uint64_t> visits_;
    std::vector<Vec> level_snapshot_;
    std::vector<Vec> pending_;
    std::uint64_t steps_total_ = 0;
    std::size_t slow_obs_since_check_ = 0;
    bool annealing_done_ = false;
};

// Minimal environment surface for episodic training: reset() yields an
// initial state, step() yields (next state, cost, terminal).
struct RlEnv {
    std::function<Vec()> reset;
    std::function<std::tuple<Vec, double, bool>(const Vec&, std::size_t)> step;
};

RlEnv make_cartpole_env(const struct PhysicsParams& params, SplitRng& reset_rng);

struct EpisodeStats {
    std::size_t steps = 0;
    double total_cost = 0.0;
};

// One episode of the two-timescale loop: select, step, Q-update, buffer the
// joint embedding, and run the slow aggregation update every n_period steps.
EpisodeStats train_episode(const RlEnv& env, AggregateQ& agg, const TwoTimescaleSchedule& sched,
                           std::size_t max_steps, SplitRng& explore_rng);

// Greedy rollout without updates.
EpisodeStats eval_episode(const RlEnv& env, const AggregateQ& agg, std::size_t max_steps);

// Uniform-grid baseline: `bins` cells per state dimension over the embedded
// [-1,1] box, one Q entry per (cell, action).
class GridQ {
public:
    GridQ(JointEmbedding embedding, std::size_t bins);

    std::size_t n_states() const;
    std::size_t cell_of(const Vec& state) const;
    const std::vector<double>& q() const { return q_; }
    std::uint64_t steps_total() const { return steps_total_; }

    double min_next_value(const Vec& state_next) const;
    std::size_t select_action(const Vec& state, double explore, SplitRng& rng) const;
    std::size_t greedy_action(const Vec& state) const;

    EpisodeStats train_episode(const RlEnv& env, const TwoTimescaleSchedule& sched,
                               std::size_t max_steps, SplitRng& explore_rng);
    EpisodeStats eval_episode(const RlEnv& env, std::size_t max_steps) const;

private:
    double& q_at(std::size_t cell, std::size_t action) { return q_[cell * embedding_.n_actions() + action]; }
    double q_at(std::size_t cell, std::size_t action) const {
        return q_[cell * embedding_.n_actions() + action];
    }

    JointEmbedding embedding_;
    std::size_t bins_;
    std::vector<double> q_;
    std::vector<std::uint64_t> visits_;
    std::uint64_t steps_total_ = 0;
};

}  // namespace oda
