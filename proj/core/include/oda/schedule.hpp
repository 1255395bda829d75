#pragma once

#include <cstddef>
#include <limits>

#include "oda/errors.hpp"

namespace oda {

// Annealing and stochastic-approximation knobs for one training run.
// Tolerances are absolute values in divergence units; the experiment layer
// scales them by a data variance estimate before building a Schedule.
struct Schedule {
    double gamma = 0.8;    // cooling factor, strictly < 1
    double t_init = 10.0;  // initial temperature
    double t_min = 0.1;    // training stops once T is cooled below this
    std::size_t k_max = 32;

    // Stepsize alpha_n = 1 / (a + b*n), reset per temperature level.
    double a = 2.0;
    double b = 0.05;

    double eps_c = 1e-3;  // convergence: T * d(mu_now, mu_prev) < eps_c
    double eps_n = 1e-3;  // merge:       T * d(mu_j, mu_i) < eps_n
    double eps_r = 1e-3;  // idle:        rho < eps_r
    double delta = 0.01;  // perturbation magnitude

    std::size_t max_obs_per_level = 100000;  // forced level cutoff
    std::size_t check_period = 10;           // observations between convergence snapshots

    // When true, cooling runs in lambda space: lambda <- gamma * lambda with
    // T = lambda / (1 - lambda). Default is geometric cooling in T.
    bool lambda_cooling = false;

    // When true, the stochastic-approximation stepsize index counts all
    // observations ever seen instead of restarting at each level. Used by the
    // reinforcement-learning slow loop, where the aggregation must keep
    // decelerating relative to the Q updates.
    bool global_stepsize_index = false;
};

inline double stepsize(const Schedule& s, std::size_t n) {
    return 1.0 / (s.a + s.b * static_cast<double>(n));
}

inline void validate(const Schedule& s) {
    if (!(s.gamma > 0.0 && s.gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
    if (!(s.t_init > 0.0)) throw ConfigError("t_init must be positive");
    if (!(s.t_min >= 0.0)) throw ConfigError("t_min must be non-negative");
    if (s.t_init <= s.t_min) throw ConfigError("t_init must exceed t_min");
    if (s.k_max == 0) throw ConfigError("k_max must be positive");
    if (!(s.a > 0.0) || !(s.b >= 0.0)) throw ConfigError("stepsize constants must be positive");
    if (!(s.eps_c > 0.0) || !(s.eps_n > 0.0) || !(s.eps_r > 0.0))
        throw ConfigError("tolerances must be positive");
    // The merge threshold must be able to re-absorb a pair that never
    // separated, so it cannot sit below rounding noise.
    if (s.eps_n < 32.0 * std::numeric_limits<double>::epsilon())
        throw ConfigError("eps_n is below floating-point resolution");
    if (!(s.eps_r < 1.0)) throw ConfigError("eps_r must be below 1");
    if (!(s.delta > 0.0)) throw ConfigError("delta must be positive");
    if (s.check_period == 0) throw ConfigError("check_period must be positive");
    if (s.max_obs_per_level < s.check_period)
        throw ConfigError("max_obs_per_level must be at least check_period");
}

// Reporting convention for temperature on a [0,1] axis.
inline double lambda_of_temperature(double t) { return 1.0 / (t + 1.0); }

}  // namespace oda
