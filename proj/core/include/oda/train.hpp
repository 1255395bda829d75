#pragma once

#include <functional>
#include <optional>

#include "oda/model.hpp"

namespace oda {

// Yields the next observation, or nullopt when the source is exhausted.
using ObservationSource = std::function<std::optional<Observation>()>;

// Invoked after each completed level with the freshly appended record; the
// harness uses it to overwrite the prequential distortion with a dataset
// evaluation and to attach accuracy.
using LevelHook = std::function<void(const OdaModel&, LevelRecord&)>;

struct StopCriteria {
    std::optional<double> target_distortion;
    std::optional<std::size_t> max_levels;
};

enum class StopReason {
    TMinReached,
    KMaxReached,
    TargetDistortionReached,
    MaxLevelsReached,
    StreamEnded,
};

const char* stop_reason_name(StopReason r);

// Runs the full annealing loop: perturb, consume the stream until the level
// converges, merge, drop idle prototypes, record the level, cool; repeats
// until a stopping criterion fires. Throws StreamExhausted if the source ends
// before the first level completes.
StopReason train(OdaModel& model, const ObservationSource& source, const StopCriteria& stop = {},
                 const LevelHook& hook = {});

}  // namespace oda
