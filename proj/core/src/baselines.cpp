#include "oda/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "oda/rng.hpp"

namespace oda {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::size_t nearest_centroid(const Vec& x, const std::vector<Vec>& centroids,
                             const Divergence& div) {
    std::size_t best = 0;
    double best_d = div.bregman(x, centroids[0]);
    for (std::size_t j = 1; j < centroids.size(); ++j) {
        const double d = div.bregman(x, centroids[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

}  // namespace

double dataset_distortion(const std::vector<Vec>& data, const std::vector<Vec>& centroids,
                          const Divergence& div) {
    double sum = 0.0;
    for (const Vec& x : data) {
        double best = div.bregman(x, centroids[0]);
        for (std::size_t j = 1; j < centroids.size(); ++j)
            best = std::min(best, div.bregman(x, centroids[j]));
        sum += best;
    }
    return sum / static_cast<double>(data.size());
}

BaselineResult kmeans_fit(const std::vector<Vec>& data, std::size_t k, const Divergence& div,
                          std::uint64_t seed, int max_iterations) {
    if (k == 0 || k > data.size())
        throw InvalidK("k = " + std::to_string(k) + " invalid for " + std::to_string(data.size()) +
                       " points");
    const auto t0 = Clock::now();
    const std::size_t n = data.size();
    const std::size_t dim = div.dimension();

    // k distinct random data points.
    SplitRng rng = SplitRng(seed).split("kmeans_init");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < k; ++i)
        std::swap(order[i], order[i + rng.uniform_index(n - i)]);
    std::vector<Vec> centroids;
    centroids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) centroids.push_back(data[order[i]]);

    BaselineResult result;
    result.k = k;
    std::vector<std::size_t> assign(n, k);
    std::uint64_t accesses = 0;
    double prev_distortion = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        double distortion = 0.0;
        std::vector<double> contribution(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = nearest_centroid(data[i], centroids, div);
            contribution[i] = div.bregman(data[i], centroids[j]);
            distortion += contribution[i];
            if (j != assign[i]) {
                assign[i] = j;
                changed = true;
            }
        }
        distortion /= static_cast<double>(n);
        accesses += n;
        result.distortion_curve.push_back({accesses, distortion});
        if (distortion > prev_distortion * (1.0 + 1e-12))
            throw NumericalError("k-means distortion increased across a Lloyd iteration");
        prev_distortion = distortion;
        if (!changed && iter > 0) break;

        // Mean re-centering (the Bregman centroid).
        std::vector<Vec> sums(k, Vec(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < dim; ++c) sums[assign[i]][c] += data[i][c];
            ++counts[assign[i]];
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] == 0) {
                // Re-seed an empty cluster at the worst-represented point.
                const std::size_t worst = static_cast<std::size_t>(
                    std::max_element(contribution.begin(), contribution.end()) -
                    contribution.begin());
                centroids[j] = data[worst];
                contribution[worst] = 0.0;
                // Distortion may rise transiently after a re-seed; reset the
                // monotonicity reference.
                prev_distortion = std::numeric_limits<double>::infinity();
                continue;
            }
            for (std::size_t c = 0; c < dim; ++c)
                centroids[j][c] = sums[j][c] / static_cast<double>(counts[j]);
        }
    }

    result.centroids = std::move(centroids);
    result.wall_ms = ms_since(t0);
    return result;
}

BaselineResult svq_fit(const ObservationSource& stream, std::size_t n_obs, std::size_t k,
                       double step_a, double step_b, const Divergence& div,
                       const std::vector<Vec>& eval_data, std::size_t eval_period) {
    if (k == 0) throw InvalidK("svq requires k >= 1");
    const auto t0 = Clock::now();

    // Winner-take-all never recovers from clumped initial centroids, so the
    // centroids are chosen by greedy farthest-point selection over a short
    // warmup of stream draws (all counted as observations).
    const std::size_t warmup = std::max<std::size_t>(k, std::max<std::size_t>(64, 8 * k));
    std::vector<Vec> pool;
    pool.reserve(warmup);
    while (pool.size() < warmup) {
        auto obs = stream();
        if (!obs) {
            if (pool.size() >= k) break;
            throw StreamExhausted("stream ended before k initial points were drawn");
        }
        pool.push_back(std::move(obs->x));
    }
    std::vector<Vec> centroids;
    centroids.reserve(k);
    centroids.push_back(pool.front());
    std::vector<double> dist_to_set(pool.size(), std::numeric_limits<double>::infinity());
    while (centroids.size() < k) {
        std::size_t farthest = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            dist_to_set[i] = std::min(dist_to_set[i], div.bregman(pool[i], centroids.back()));
            if (dist_to_set[i] > dist_to_set[farthest]) farthest = i;
        }
        centroids.push_back(pool[farthest]);
    }

    BaselineResult result;
    result.k = k;
    std::uint64_t seen = pool.size();
    const auto record = [&]() {
        if (!eval_data.empty())
            result.distortion_curve.push_back({seen, dataset_distortion(eval_data, centroids, div)});
    };
    record();

    for (std::size_t n = 0; n < n_obs; ++n) {
        auto obs = stream();
        if (!obs) break;
        const std::size_t winner = nearest_centroid(obs->x, centroids, div);
        const double alpha = 1.0 / (step_a + step_b * static_cast<double>(n));
        for (std::size_t c = 0; c < centroids[winner].size(); ++c)
            centroids[winner][c] += alpha * (obs->x[c] - centroids[winner][c]);
        ++seen;
        if (eval_period > 0 && seen % eval_period == 0) record();
    }
    if (result.distortion_curve.empty() || result.distortion_curve.back().observations != seen)
        record();

    result.centroids = std::move(centroids);
    result.wall_ms = ms_since(t0);
    return result;
}

BaselineResult batch_da_fit(const std::vector<Vec>& data, const Schedule& schedule,
                            const Divergence& div, std::uint64_t seed,
                            int max_em_iterations_per_level) {
    if (data.empty()) throw ConfigError("batch_da_fit on empty data");
    validate(schedule);
    const auto t0 = Clock::now();
    const std::size_t n = data.size();
    const std::size_t dim = div.dimension();
    SplitRng rng = SplitRng(seed).split("batch_da_perturb");

    // Start from the data mean with unit mass.
    Vec mean(dim, 0.0);
    for (const Vec& x : data)
        for (std::size_t c = 0; c < dim; ++c) mean[c] += x[c];
    for (auto& v : mean) v /= static_cast<double>(n);
    std::vector<Vec> centroids{mean};
    std::vector<double> mass{1.0};

    BaselineResult result;
    double temperature = schedule.t_init;
    std::uint64_t accesses = 0;
    const bool positive_domain = div.kind() == DivergenceKind::GeneralizedIDivergence;

    while (true) {
        // Perturbation pairs, as in the online engine.
        {
            std::vector<Vec> next;
            std::vector<double> next_mass;
            next.reserve(2 * centroids.size());
            for (std::size_t i = 0; i < centroids.size(); ++i) {
                Vec u = rng.unit_vector(dim);
                for (const double sign : {+1.0, -1.0}) {
                    Vec c(dim);
                    for (std::size_t d2 = 0; d2 < dim; ++d2)
                        c[d2] = centroids[i][d2] + sign * schedule.delta * u[d2];
                    if (positive_domain)
                        for (auto& v : c) v = std::max(v, 16.0 * Divergence::kPositiveFloor);
                    next.push_back(std::move(c));
                    next_mass.push_back(mass[i] / 2.0);
                }
            }
            centroids = std::move(next);
            mass = std::move(next_mass);
        }

        // EM to convergence at this temperature.
        double prev_distortion = dataset_distortion(data, centroids, div);
        for (int iter = 0; iter < max_em_iterations_per_level; ++iter) {
            const std::size_t k = centroids.size();
            std::vector<Vec> weighted_sum(k, Vec(dim, 0.0));
            std::vector<double> weight(k, 0.0);
            Vec d(k), p(k);
            for (const Vec& x : data) {
                for (std::size_t j = 0; j < k; ++j) d[j] = div.bregman(x, centroids[j]);
                const double d_min = *std::min_element(d.begin(), d.end());
                double sum = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    p[j] = std::exp(-(d[j] - d_min) / temperature);  // uniform priors
                    sum += p[j];
                }
                for (std::size_t j = 0; j < k; ++j) {
                    p[j] /= sum;
                    weight[j] += p[j];
                    for (std::size_t c = 0; c < dim; ++c) weighted_sum[j][c] += p[j] * x[c];
                }
            }
            for (std::size_t j = 0; j < k; ++j) {
                mass[j] = weight[j] / static_cast<double>(n);
                if (weight[j] <= 0.0) continue;
                for (std::size_t c = 0; c < dim; ++c)
                    centroids[j][c] = weighted_sum[j][c] / weight[j];
                if (positive_domain)
                    for (auto& v : centroids[j])
                        v = std::max(v, 16.0 * Divergence::kPositiveFloor);
            }
            accesses += n;
            const double distortion = dataset_distortion(data, centroids, div);
            result.distortion_curve.push_back({accesses, distortion});
            const bool settled = std::abs(prev_distortion - distortion) < schedule.eps_c;
            prev_distortion = distortion;
            if (settled) break;
        }

        // Keep effective centroids.
        {
            const std::size_t k = centroids.size();
            std::vector<bool> alive(k, true);
            for (std::size_t j = 0; j < k; ++j) {
                if (!alive[j]) continue;
                for (std::size_t i = j + 1; i < k; ++i) {
                    if (!alive[i]) continue;
                    if (temperature * div.bregman(centroids[j], centroids[i]) < schedule.eps_n) {
                        mass[j] += mass[i];
                        alive[i] = false;
                    }
                }
            }
            // Drop idle centroids, never the most massive surviving one.
            std::size_t best = k;
            for (std::size_t j = 0; j < k; ++j)
                if (alive[j] && (best == k || mass[j] > mass[best])) best = j;
            std::vector<Vec> kept;
            std::vector<double> kept_mass;
            for (std::size_t j = 0; j < k; ++j) {
                if (!alive[j]) continue;
                if (mass[j] < schedule.eps_r && j != best) continue;
                kept.push_back(std::move(centroids[j]));
                kept_mass.push_back(mass[j]);
            }
            const double total = std::accumulate(kept_mass.begin(), kept_mass.end(), 0.0);
            for (auto& m : kept_mass) m /= total;
            centroids = std::move(kept);
            mass = std::move(kept_mass);
        }

        if (centroids.size() >= schedule.k_max) break;
        temperature *= schedule.gamma;
        if (temperature < schedule.t_min) break;
    }

    result.centroids = std::move(centroids);
    result.k = result.centroids.size();
    result.wall_ms = ms_since(t0);
    return result;
}

}  // namespace oda
