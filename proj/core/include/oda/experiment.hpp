#pragma once

#include "oda/io/config.hpp"
#include "oda/tasks.hpp"
#include "oda/train.hpp"

namespace oda {

// Per-coordinate zero-mean/unit-variance transform fitted on the training
// split and applied to every row.
struct Standardizer {
    Vec mean;
    Vec stddev;

    static Standardizer fit(const std::vector<Observation>& rows);
    void apply(LabeledDataset& data) const;
};

LabeledDataset load_experiment_data(const ExperimentConfig& cfg);

// Seeded shuffle split; second element holds `fraction` of the rows.
std::pair<LabeledDataset, LabeledDataset> split_holdout(const LabeledDataset& data,
                                                        double fraction, SplitRng rng);

// Mean per-coordinate sample variance; scales tolerances and perturbations.
double variance_estimate(const std::vector<Observation>& rows);

// Infinite i.i.d. resampling stream over the rows.
ObservationSource make_resampling_stream(const LabeledDataset& data, SplitRng rng);

// Runs one experiment end to end and writes its artifacts into cfg.out_dir.
// Returns a process exit code: 0 success, 2 config/input error, 3 numerical
// failure; failure messages go to stderr.
int run_experiment(const ExperimentConfig& cfg);

// Same, but lets errors propagate (used by tests).
void run_experiment_or_throw(const ExperimentConfig& cfg);

}  // namespace oda
