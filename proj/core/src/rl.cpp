#include "oda/rl.hpp"

#include <algorithm>
#include <cmath>

#include "oda/envs/cartpole.hpp"

namespace oda {

Vec JointEmbedding::embed(const Vec& state, std::size_t action) const {
    if (state.size() != state_half_range.size())
        throw DimensionMismatch("state dimension does not match embedding");
    if (action >= action_codes.size()) throw IndexError("action index out of range");
    Vec e(dim());
    // The half-ranges define the support box; states outside clamp to its
    // faces, the same aliasing a uniform grid applies at its edge bins.
    for (std::size_t i = 0; i < state.size(); ++i)
        e[i] = std::clamp(state[i] / state_half_range[i], -1.0, 1.0);
    e[state.size()] = action_codes[action];
    return e;
}

JointEmbedding JointEmbedding::cartpole() {
    JointEmbedding e;
    // Half-ranges of the [-1,1]x[-4,4]x[-1,1]x[-4,4] support box in its
    // source ordering (x, x_dot, theta, theta_dot), applied to this module's
    // (x, theta, x_dot, theta_dot) layout. Scaling the angle by its own
    // [-1,1] box keeps it geometrically visible to the aggregation.
    e.state_half_range = {1.0, 1.0, 4.0, 4.0};
    e.action_codes = {-1.0, +1.0};
    return e;
}

double fast_stepsize(const TwoTimescaleSchedule& s, std::uint64_t n) {
    return std::pow(1.0 + static_cast<double>(n), -s.fast_power);
}

double slow_stepsize(const TwoTimescaleSchedule& s, std::uint64_t n) {
    return std::pow(1.0 + static_cast<double>(n), -s.slow_power);
}

double explore_rate(const TwoTimescaleSchedule& s, std::uint64_t n) {
    return std::max(s.explore_min, 1.0 / (1.0 + static_cast<double>(n) / s.explore_scale));
}

void validate(const TwoTimescaleSchedule& s) {
    if (!(s.discount > 0.0 && s.discount < 1.0)) throw ConfigError("discount must lie in (0,1)");
    if (!(s.fast_power > 0.5 && s.fast_power <= 1.0))
        throw ConfigError("fast_power must lie in (0.5, 1] for summable squared stepsizes");
    if (!(s.slow_power > s.fast_power))
        throw ConfigError("slow stepsizes must decay faster than fast ones");
    if (s.n_period == 0) throw ConfigError("n_period must be positive");
    // beta_n / alpha_n must shrink: sample the ratio over six decades.
    double prev = slow_stepsize(s, 1) / fast_stepsize(s, 1);
    for (std::uint64_t n = 10; n <= 1000000; n *= 10) {
        const double ratio = slow_stepsize(s, n) / fast_stepsize(s, n);
        if (ratio > prev * (1.0 + 1e-12))
            throw ConfigError("beta_n/alpha_n is not non-increasing");
        prev = ratio;
    }
}

AggregateQ::AggregateQ(OdaModel aggregator, JointEmbedding embedding)
    : aggregator_(std::move(aggregator)), embedding_(std::move(embedding)) {
    if (aggregator_.divergence().dimension() != embedding_.dim())
        throw DimensionMismatch("aggregator dimension must equal embedding dimension");
    if (aggregator_.classification_mode())
        throw ConfigError("the RL aggregator runs in clustering mode");
    q_.assign(aggregator_.prototype_count(), 0.0);
    visits_.assign(aggregator_.prototype_count(), 0);
    level_snapshot_ = aggregator_.snapshot_mus();
}

std::size_t AggregateQ::nearest_embedded(const Vec& embedded) const {
    const auto& protos = aggregator_.prototypes();
    std::size_t best = 0;
    double best_d = aggregator_.divergence().bregman(embedded, protos[0].mu);
    for (std::size_t i = 1; i < protos.size(); ++i) {
        const double d = aggregator_.divergence().bregman(embedded, protos[i].mu);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::size_t AggregateQ::nearest(const Vec& state, std::size_t action) const {
    return nearest_embedded(embedding_.embed(state, action));
}

double AggregateQ::min_next_value(const Vec& state_next) const {
    double best = q_[nearest(state_next, 0)];
    for (std::size_t u = 1; u < embedding_.n_actions(); ++u)
        best = std::min(best, q_[nearest(state_next, u)]);
    return best;
}

void AggregateQ::q_update(std::size_t h, const Vec& state_next, double cost,
                          const TwoTimescaleSchedule& sched, std::uint64_t n, bool terminal) {
    if (h >= q_.size()) throw IndexError("aggregate index out of range");
    const double alpha = fast_stepsize(sched, n);
    const double bootstrap = terminal ? 0.0 : sched.discount * min_next_value(state_next);
    q_[h] += alpha * (cost + bootstrap - q_[h]);
    ++visits_[h];
}

std::size_t AggregateQ::select_action(const Vec& state, double explore, SplitRng& rng) const {
    const std::size_t m = embedding_.n_actions();
    if (m == 0) throw ConfigError("empty action set");
    if (explore > 0.0 && rng.uniform() < explore) return rng.uniform_index(m);
    return greedy_action(state);
}

std::size_t AggregateQ::greedy_action(const Vec& state) const {
    std::size_t best_u = 0;
    double best_q = q_[nearest(state, 0)];
    for (std::size_t u = 1; u < embedding_.n_actions(); ++u) {
        const double qu = q_[nearest(state, u)];
        if (qu < best_q) {
            best_q = qu;
            best_u = u;
        }
    }
    return best_u;
}

void AggregateQ::apply_perturb_log(const ResizeLog& log) {
    std::vector<double> q_new(log.parent_of_new.size());
    std::vector<std::uint64_t> v_new(log.parent_of_new.size());
    std::vector<std::size_t> children_seen(q_.size(), 0);
    for (std::size_t c = 0; c < log.parent_of_new.size(); ++c) {
        const std::size_t parent = log.parent_of_new[c];
        q_new[c] = q_[parent];
        // Visit counts split across the pair so the total is preserved.
        const std::uint64_t v = visits_[parent];
        v_new[c] = children_seen[parent] == 0 ? (v + 1) / 2 : v / 2;
        ++children_seen[parent];
    }
    q_ = std::move(q_new);
    visits_ = std::move(v_new);
}

void AggregateQ::apply_merge_log(const ResizeLog& log) {
    const std::size_t k_old = log.new_index_of_old.size();
    std::size_t k_new = 0;
    for (const auto idx : log.new_index_of_old)
        if (idx != ResizeLog::kRemoved) ++k_new;
    std::vector<double> weighted(k_new, 0.0), weight(k_new, 0.0);
    std::vector<std::uint64_t> v_new(k_new, 0);
    for (std::size_t i = 0; i < k_old; ++i) {
        const std::size_t survivor = log.absorbed_into[i];
        const std::size_t target = log.new_index_of_old[survivor];
        weighted[target] += log.old_rho[i] * q_[i];
        weight[target] += log.old_rho[i];
        v_new[target] += visits_[i];
    }
    std::vector<double> q_new(k_new);
    for (std::size_t j = 0; j < k_new; ++j) q_new[j] = weight[j] > 0.0 ? weighted[j] / weight[j] : 0.0;
    q_ = std::move(q_new);
    visits_ = std::move(v_new);
}

void AggregateQ::apply_removal_log(const ResizeLog& log) {
    std::size_t k_new = 0;
    for (const auto idx : log.new_index_of_old)
        if (idx != ResizeLog::kRemoved) ++k_new;
    std::vector<double> q_new(k_new);
    std::vector<std::uint64_t> v_new(k_new);
    for (std::size_t i = 0; i < log.new_index_of_old.size(); ++i) {
        const std::size_t target = log.new_index_of_old[i];
        if (target == ResizeLog::kRemoved) continue;
        q_new[target] = q_[i];
        v_new[target] = visits_[i];
    }
    q_ = std::move(q_new);
    visits_ = std::move(v_new);
}

void AggregateQ::slow_update(const std::vector<Vec>& buffer) {
    if (annealing_done_ || buffer.empty()) return;
    const Schedule& sched = aggregator_.schedule();
    for (const Vec& e : buffer) {
        aggregator_.sa_update(Observation{e, std::nullopt});
        ++slow_obs_since_check_;
        if (slow_obs_since_check_ < sched.check_period &&
            aggregator_.obs_count_level() < sched.max_obs_per_level)
            continue;
        slow_obs_since_check_ = 0;
        if (!aggregator_.check_convergence(level_snapshot_)) {
            level_snapshot_ = aggregator_.snapshot_mus();
            continue;
        }
        // Level converged: close it exactly as the offline loop does.
        ResizeLog log;
        aggregator_.merge_effective(&log);
        apply_merge_log(log);
        aggregator_.remove_idle(&log);
        apply_removal_log(log);
        aggregator_.lower_temperature();
        if (aggregator_.prototype_count() >= sched.k_max || aggregator_.below_t_min()) {
            annealing_done_ = true;
            return;
        }
        aggregator_.perturb(&log);
        apply_perturb_log(log);
        level_snapshot_ = aggregator_.snapshot_mus();
    }
}

void AggregateQ::buffer_joint(const Vec& state, std::size_t action,
                              const TwoTimescaleSchedule& sched) {
    if (annealing_done_) return;
    pending_.push_back(embedding_.embed(state, action));
    std::size_t period = sched.n_period;
    if (sched.n_period_doubles)
        period <<= std::min<std::size_t>(aggregator_.level_index(), sched.n_period_max_doublings);
    if (pending_.size() < period) return;
    slow_update(pending_);
    pending_.clear();
}

AggregateQ::Snapshot AggregateQ::to_snapshot() const {
    return Snapshot{aggregator_.to_snapshot(), embedding_, q_, visits_, steps_total_,
                    annealing_done_};
}

AggregateQ AggregateQ::from_snapshot(Snapshot snap, std::uint64_t rng_seed) {
    AggregateQ agg(OdaModel::from_snapshot(std::move(snap.aggregator), rng_seed),
                   std::move(snap.embedding));
    if (snap.q.size() != agg.aggregator_.prototype_count())
        throw DegenerateModel("checkpoint q size does not match prototype count");
    agg.q_ = std::move(snap.q);
    agg.visits_ = snap.visits.empty() ? std::vector<std::uint64_t>(agg.q_.size(), 0)
                                      : std::move(snap.visits);
    agg.steps_total_ = snap.steps_total;
    agg.annealing_done_ = snap.annealing_done;
    return agg;
}

RlEnv make_cartpole_env(const PhysicsParams& params, SplitRng& reset_rng) {
    RlEnv env;
    env.reset = [&reset_rng]() {
        const CartPoleState s = reset_cartpole(reset_rng);
        return Vec{s.x, s.theta, s.x_dot, s.theta_dot};
    };
    env.step = [params](const Vec& state, std::size_t action) {
        CartPoleState s{state[0], state[1], state[2], state[3]};
        const double force = action == 0 ? -10.0 : 10.0;
        const CartPoleStep out = step_cartpole(s, force, params);
        const Vec next{out.state.x, out.state.theta, out.state.x_dot, out.state.theta_dot};
        // Survival costs nothing; the failure transition costs 1.
        const double cost = out.failed ? 1.0 : 0.0;
        return std::make_tuple(next, cost, out.failed);
    };
    return env;
}

EpisodeStats train_episode(const RlEnv& env, AggregateQ& agg, const TwoTimescaleSchedule& sched,
                           std::size_t max_steps, SplitRng& explore_rng) {
    EpisodeStats stats;
    Vec x = env.reset();
    for (std::size_t step = 0; step < max_steps; ++step) {
        double eps;
        if (sched.per_aggregate_explore) {
            const std::size_t h_greedy = agg.nearest(x, agg.greedy_action(x));
            eps = explore_rate(sched, agg.visit_counts()[h_greedy]);
        } else {
            eps = explore_rate(sched, agg.steps_total());
        }
        const std::size_t u = agg.select_action(x, eps, explore_rng);
        const std::size_t h = agg.nearest(x, u);
        auto [x_next, cost, terminal] = env.step(x, u);
        // Asynchronous stepsizes: each aggregate decays with its own visit
        // count, so late-created aggregates still learn quickly.
        agg.q_update(h, x_next, cost, sched, agg.visit_counts()[h], terminal);
        agg.buffer_joint(x, u, sched);
        agg.count_step();
        ++stats.steps;
        stats.total_cost += cost;
        if (terminal) break;
        x = std::move(x_next);
    }
    return stats;
}

EpisodeStats eval_episode(const RlEnv& env, const AggregateQ& agg, std::size_t max_steps) {
    EpisodeStats stats;
    Vec x = env.reset();
    for (std::size_t step = 0; step < max_steps; ++step) {
        const std::size_t u = agg.greedy_action(x);
        auto [x_next, cost, terminal] = env.step(x, u);
        ++stats.steps;
        stats.total_cost += cost;
        if (terminal) break;
        x = std::move(x_next);
    }
    return stats;
}

GridQ::GridQ(JointEmbedding embedding, std::size_t bins)
    : embedding_(std::move(embedding)), bins_(bins) {
    if (bins_ == 0) throw ConfigError("grid needs at least one bin per dimension");
    std::size_t cells = 1;
    for (std::size_t i = 0; i < embedding_.state_half_range.size(); ++i) cells *= bins_;
    q_.assign(cells * embedding_.n_actions(), 0.0);
    visits_.assign(q_.size(), 0);
}

std::size_t GridQ::n_states() const { return q_.size() / embedding_.n_actions(); }

std::size_t GridQ::cell_of(const Vec& state) const {
    std::size_t cell = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double norm = state[i] / embedding_.state_half_range[i];  // nominally [-1, 1]
        const double t = (norm + 1.0) / 2.0 * static_cast<double>(bins_);
        const auto bin = static_cast<std::size_t>(
            std::clamp(t, 0.0, static_cast<double>(bins_) - 1.0));
        cell = cell * bins_ + bin;
    }
    return cell;
}

double GridQ::min_next_value(const Vec& state_next) const {
    const std::size_t cell = cell_of(state_next);
    double best = q_at(cell, 0);
    for (std::size_t u = 1; u < embedding_.n_actions(); ++u) best = std::min(best, q_at(cell, u));
    return best;
}

std::size_t GridQ::select_action(const Vec& state, double explore, SplitRng& rng) const {
    const std::size_t m = embedding_.n_actions();
    if (explore > 0.0 && rng.uniform() < explore) return rng.uniform_index(m);
    return greedy_action(state);
}

std::size_t GridQ::greedy_action(const Vec& state) const {
    const std::size_t cell = cell_of(state);
    std::size_t best_u = 0;
    for (std::size_t u = 1; u < embedding_.n_actions(); ++u)
        if (q_at(cell, u) < q_at(cell, best_u)) best_u = u;
    return best_u;
}

EpisodeStats GridQ::train_episode(const RlEnv& env, const TwoTimescaleSchedule& sched,
                                  std::size_t max_steps, SplitRng& explore_rng) {
    EpisodeStats stats;
    Vec x = env.reset();
    for (std::size_t step = 0; step < max_steps; ++step) {
        double eps;
        if (sched.per_aggregate_explore) {
            const std::size_t cell_g = cell_of(x);
            eps = explore_rate(sched, visits_[cell_g * embedding_.n_actions() + greedy_action(x)]);
        } else {
            eps = explore_rate(sched, steps_total_);
        }
        const std::size_t u = select_action(x, eps, explore_rng);
        const std::size_t cell = cell_of(x);
        auto [x_next, cost, terminal] = env.step(x, u);
        const std::size_t entry = cell * embedding_.n_actions() + u;
        const double alpha = fast_stepsize(sched, visits_[entry]);
        const double bootstrap = terminal ? 0.0 : sched.discount * min_next_value(x_next);
        q_[entry] += alpha * (cost + bootstrap - q_[entry]);
        ++visits_[entry];
        ++steps_total_;
        ++stats.steps;
        stats.total_cost += cost;
        if (terminal) break;
        x = std::move(x_next);
    }
    return stats;
}

EpisodeStats GridQ::eval_episode(const RlEnv& env, std::size_t max_steps) const {
    EpisodeStats stats;
    Vec x = env.reset();
    for (std::size_t step = 0; step < max_steps; ++step) {
        const std::size_t u = greedy_action(x);
        auto [x_next, cost, terminal] = env.step(x, u);
        ++stats.steps;
        stats.total_cost += cost;
        if (terminal) break;
        x = std::move(x_next);
    }
    return stats;
}

}  // namespace oda
