#include "oda/train.hpp"

namespace oda {

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::TMinReached: return "t_min_reached";
        case StopReason::KMaxReached: return "k_max_reached";
        case StopReason::TargetDistortionReached: return "target_distortion";
        case StopReason::MaxLevelsReached: return "max_levels";
        case StopReason::StreamEnded: return "stream_ended";
    }
    return "unknown";
}

StopReason train(OdaModel& model, const ObservationSource& source, const StopCriteria& stop,
                 const LevelHook& hook) {
    const Schedule& sched = model.schedule();
    bool stream_ended = false;

    for (;;) {
        model.perturb();
        std::vector<Vec> snapshot = model.snapshot_mus();

        bool converged = false;
        while (!converged) {
            std::optional<Observation> obs = source();
            if (!obs) {
                if (model.history().empty())
                    throw StreamExhausted("observation source ended before the first level converged");
                stream_ended = true;
                break;
            }
            model.sa_update(*obs);
            if (model.obs_count_level() % sched.check_period == 0 ||
                model.obs_count_level() >= sched.max_obs_per_level) {
                converged = model.check_convergence(snapshot);
                snapshot = model.snapshot_mus();
            }
        }

        model.merge_effective();
        model.remove_idle();
        model.lower_temperature();
        LevelRecord& rec = model.history_back();
        if (hook) hook(model, rec);

        if (stream_ended) return StopReason::StreamEnded;
        if (model.prototype_count() >= sched.k_max) return StopReason::KMaxReached;
        if (model.below_t_min()) return StopReason::TMinReached;
        if (stop.target_distortion && rec.distortion <= *stop.target_distortion)
            return StopReason::TargetDistortionReached;
        if (stop.max_levels && model.level_index() >= *stop.max_levels)
            return StopReason::MaxLevelsReached;
    }
}

}  // namespace oda
