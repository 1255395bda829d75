#pragma once

#include <cstdint>
#include <vector>

#include "oda/divergence.hpp"
#include "oda/schedule.hpp"
#include "oda/train.hpp"

namespace oda {

struct DistortionPoint {
    std::uint64_t observations = 0;  // cumulative sample accesses
    double distortion = 0.0;
};

struct BaselineResult {
    std::vector<Vec> centroids;
    std::vector<DistortionPoint> distortion_curve;
    std::size_t k = 0;
    double wall_ms = 0.0;
};

// Lloyd iterations under a Bregman divergence: assign by argmin d_phi,
// re-center by the mean, until the assignment reaches a fixpoint or the
// iteration cap. Initialized from k distinct data points drawn with `seed`.
// Empty clusters are re-seeded at the point with the largest distortion
// contribution. Each iteration counts |data| sample accesses on the curve.
BaselineResult kmeans_fit(const std::vector<Vec>& data, std::size_t k, const Divergence& div,
                          std::uint64_t seed, int max_iterations = 200);

// Online winner-take-all vector quantization: the nearest centroid moves by
// alpha(n) * (x - mu), everything else stays. Centroids come from a greedy
// farthest-point selection over a short stream warmup (counted as
// observations). The curve is evaluated on eval_data every eval_period
// observations.
BaselineResult svq_fit(const ObservationSource& stream, std::size_t n_obs, std::size_t k,
                       double step_a, double step_b, const Divergence& div,
                       const std::vector<Vec>& eval_data, std::size_t eval_period);

// Batch deterministic annealing: per temperature level, full-dataset
// expectation of unweighted Gibbs memberships alternating with centroid
// re-estimation until the distortion change drops below eps_c, with the same
// perturb/merge/idle machinery as the online engine. Each EM pass counts
// |data| sample accesses.
BaselineResult batch_da_fit(const std::vector<Vec>& data, const Schedule& schedule,
                            const Divergence& div, std::uint64_t seed,
                            int max_em_iterations_per_level = 100);

double dataset_distortion(const std::vector<Vec>& data, const std::vector<Vec>& centroids,
                          const Divergence& div);

}  // namespace oda
