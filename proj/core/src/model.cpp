#include "oda/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

namespace oda {

namespace {

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

Vec scaled(const Vec& v, double s) {
    Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * s;
    return r;
}

}  // namespace

OdaModel::OdaModel(Divergence divergence, Schedule schedule, std::uint64_t rng_seed)
    : divergence_(std::move(divergence)),
      schedule_(schedule),
      temperature_(schedule.t_init),
      rng_(SplitRng(rng_seed).split("perturb")) {
    validate(schedule_);
    if (stepsize(schedule_, 0) >= 1.0)
        throw ConfigError(
            "stepsize a must exceed 1: alpha(0) = 1 overwrites the perturbation "
            "offsets (and zeroes off-class masses in classification)");
}

OdaModel OdaModel::init_clustering(Divergence divergence, Schedule schedule, Vec mu0,
                                   std::uint64_t rng_seed) {
    std::vector<Vec> one;
    one.push_back(std::move(mu0));
    return init_clustering_many(std::move(divergence), schedule, std::move(one), rng_seed);
}

OdaModel OdaModel::init_clustering_many(Divergence divergence, Schedule schedule,
                                        std::vector<Vec> mu0s, std::uint64_t rng_seed) {
    if (mu0s.empty()) throw ConfigError("clustering init requires at least one codevector");
    if (mu0s.size() > 2 * schedule.k_max)
        throw ConfigError("initial codevector count exceeds 2*k_max");
    OdaModel m(std::move(divergence), schedule, rng_seed);
    const double rho0 = 1.0 / static_cast<double>(mu0s.size());
    for (auto& mu0 : mu0s) {
        m.divergence_.require_valid(mu0);
        Prototype p;
        p.mu = std::move(mu0);
        p.rho = rho0;
        p.sigma = scaled(p.mu, p.rho);
        m.prototypes_.push_back(std::move(p));
    }
    m.start_level_tracking();
    return m;
}

OdaModel OdaModel::init_classification(Divergence divergence, Schedule schedule,
                                       std::vector<std::pair<std::string, Vec>> class_inits,
                                       std::uint64_t rng_seed) {
    if (class_inits.empty()) throw ConfigError("classification init requires at least one class");
    OdaModel m(std::move(divergence), schedule, rng_seed);
    m.classification_ = true;
    std::sort(class_inits.begin(), class_inits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const double rho0 = 1.0 / static_cast<double>(class_inits.size());
    for (auto& [label, mu] : class_inits) {
        m.divergence_.require_valid(mu);
        Prototype p;
        p.mu = std::move(mu);
        p.label = label;
        p.rho = rho0;
        p.sigma = scaled(p.mu, p.rho);
        m.prototypes_.push_back(std::move(p));
    }
    m.start_level_tracking();
    return m;
}

void OdaModel::start_level_tracking() {
    obs_count_level_ = 0;
    forced_cutoff_ = false;
    level_distortion_sum_ = 0.0;
    level_distortion_n_ = 0;
    level_start_ns_ = now_ns();
}

std::vector<Vec> OdaModel::snapshot_mus() const {
    std::vector<Vec> mus;
    mus.reserve(prototypes_.size());
    for (const auto& p : prototypes_) mus.push_back(p.mu);
    return mus;
}

double OdaModel::total_mass() const {
    double s = 0.0;
    for (const auto& p : prototypes_) s += p.rho;
    return s;
}

void OdaModel::distances_to(const Vec& x, Vec& out) const {
    out.resize(prototypes_.size());
    for (std::size_t i = 0; i < prototypes_.size(); ++i)
        out[i] = divergence_.bregman(x, prototypes_[i].mu);
    counters_.distance_evals += prototypes_.size();
}

Vec OdaModel::memberships_from_distances(const Vec& d) const {
    const double d_min = *std::min_element(d.begin(), d.end());
    Vec w(d.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        w[i] = prototypes_[i].rho * std::exp(-(d[i] - d_min) / temperature_);
        sum += w[i];
    }
    // The argmin term alone contributes rho_argmin * exp(0) > 0.
    if (!(sum > 0.0)) throw DegenerateModel("all membership weights vanished");
    for (auto& v : w) v /= sum;
    return w;
}

Vec OdaModel::gibbs_memberships(const Vec& x) const {
    if (prototypes_.empty()) throw DegenerateModel("model has no prototypes");
    divergence_.require_valid(x);
    Vec d;
    distances_to(x, d);
    return memberships_from_distances(d);
}

void OdaModel::sa_update(const Observation& obs) {
    divergence_.require_valid(obs.x);
    if (classification_ && !obs.label)
        throw DomainError("classification model requires labeled observations");

    Vec d;
    distances_to(obs.x, d);
    level_distortion_sum_ += *std::min_element(d.begin(), d.end());
    level_distortion_n_ += 1;

    const Vec p_hat = memberships_from_distances(d);
    const double alpha = stepsize(schedule_, schedule_.global_stepsize_index
                                                 ? static_cast<std::size_t>(obs_count_total_)
                                                 : obs_count_level_);
    const std::size_t dim = divergence_.dimension();

    for (std::size_t i = 0; i < prototypes_.size(); ++i) {
        Prototype& p = prototypes_[i];
        const double s = classification_ ? (p.label == obs.label ? 1.0 : 0.0) : 1.0;
        const double target = s * p_hat[i];
        p.rho += alpha * (target - p.rho);
        if (!(p.rho > 0.0))
            throw NumericalError("prototype mass driven to " + std::to_string(p.rho) +
                                 "; stepsize schedule is misconfigured");
        for (std::size_t k = 0; k < dim; ++k)
            p.sigma[k] += alpha * (target * obs.x[k] - p.sigma[k]);
        for (std::size_t k = 0; k < dim; ++k) p.mu[k] = p.sigma[k] / p.rho;
    }
    ++obs_count_level_;
    ++obs_count_total_;
    ++counters_.observations;
}

bool OdaModel::check_convergence(const std::vector<Vec>& previous_mus) {
    if (previous_mus.size() != prototypes_.size())
        throw AlignmentError("previous snapshot has " + std::to_string(previous_mus.size()) +
                             " prototypes, model has " + std::to_string(prototypes_.size()));
    if (obs_count_level_ >= schedule_.max_obs_per_level) {
        forced_cutoff_ = true;
        return true;
    }
    for (std::size_t i = 0; i < prototypes_.size(); ++i) {
        const double motion = divergence_.bregman(prototypes_[i].mu, previous_mus[i]);
        if (!(temperature_ * motion < schedule_.eps_c)) return false;
    }
    return true;
}

void OdaModel::perturb(ResizeLog* log) {
    const std::size_t k_old = prototypes_.size();
    if (k_old > schedule_.k_max)
        throw CapacityExceeded("doubling " + std::to_string(k_old) +
                               " prototypes would exceed 2*k_max = " +
                               std::to_string(2 * schedule_.k_max));

    const std::size_t dim = divergence_.dimension();
    const bool positive_domain = divergence_.kind() == DivergenceKind::GeneralizedIDivergence;
    // Perturbed children must stay inside the divergence domain.
    const auto clamp_into_domain = [&](Vec& v) {
        if (!positive_domain) return;
        for (auto& c : v) c = std::max(c, 16.0 * Divergence::kPositiveFloor);
    };

    std::vector<Prototype> children;
    children.reserve(2 * k_old);
    if (log) {
        log->parent_of_new.clear();
        log->new_index_of_old.clear();
        log->absorbed_into.clear();
        log->old_rho.clear();
    }

    const auto spawn = [&](std::size_t parent, const Vec& offset, double sign) {
        const Prototype& src = prototypes_[parent];
        Prototype c;
        c.mu.resize(dim);
        for (std::size_t k = 0; k < dim; ++k) c.mu[k] = src.mu[k] + sign * offset[k];
        clamp_into_domain(c.mu);
        c.label = src.label;
        c.rho = src.rho / 2.0;
        c.sigma = scaled(c.mu, c.rho);
        children.push_back(std::move(c));
        if (log) log->parent_of_new.push_back(parent);
    };

    for (std::size_t i = 0; i < k_old; ++i) {
        const Vec offset = scaled(rng_.unit_vector(dim), schedule_.delta);
        spawn(i, offset, +1.0);
        spawn(i, offset, -1.0);
    }

    if (classification_) {
        // One extra perturbed codevector per class, taken from the class's
        // most massive prototype, while capacity allows.
        std::map<std::string, std::size_t> heaviest;
        for (std::size_t i = 0; i < k_old; ++i) {
            const auto& lbl = *prototypes_[i].label;
            auto it = heaviest.find(lbl);
            if (it == heaviest.end() || prototypes_[i].rho > prototypes_[it->second].rho)
                heaviest[lbl] = i;
        }
        for (const auto& [lbl, idx] : heaviest) {
            if (children.size() >= 2 * schedule_.k_max) break;
            const Vec offset = scaled(rng_.unit_vector(dim), schedule_.delta);
            spawn(idx, offset, +1.0);
        }
    }

    prototypes_ = std::move(children);
    renormalize_mass();
    start_level_tracking();
}

void OdaModel::merge_effective(ResizeLog* log) {
    const std::size_t k = prototypes_.size();
    std::vector<bool> alive(k, true);
    std::vector<std::size_t> absorbed(k);
    std::vector<double> old_rho(k);
    for (std::size_t i = 0; i < k; ++i) {
        absorbed[i] = i;
        old_rho[i] = prototypes_[i].rho;
    }

    for (std::size_t j = 0; j < k; ++j) {
        if (!alive[j]) continue;
        for (std::size_t i = j + 1; i < k; ++i) {
            if (!alive[i]) continue;
            ++counters_.merge_comparisons;
            if (classification_ && prototypes_[j].label != prototypes_[i].label) continue;
            const double d = divergence_.bregman(prototypes_[j].mu, prototypes_[i].mu);
            ++counters_.distance_evals;
            if (temperature_ * d < schedule_.eps_n) {
                prototypes_[j].rho += prototypes_[i].rho;
                alive[i] = false;
                absorbed[i] = j;
            }
        }
        prototypes_[j].sigma = scaled(prototypes_[j].mu, prototypes_[j].rho);
    }

    std::vector<std::size_t> new_index(k, ResizeLog::kRemoved);
    std::vector<Prototype> kept;
    kept.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!alive[i]) continue;
        new_index[i] = kept.size();
        kept.push_back(std::move(prototypes_[i]));
    }
    prototypes_ = std::move(kept);
    if (log) {
        log->parent_of_new.clear();
        log->new_index_of_old = std::move(new_index);
        log->absorbed_into = std::move(absorbed);
        log->old_rho = std::move(old_rho);
    }
}

void OdaModel::remove_idle(ResizeLog* log) {
    const std::size_t k = prototypes_.size();
    std::vector<bool> keep(k);
    for (std::size_t i = 0; i < k; ++i) keep[i] = prototypes_[i].rho >= schedule_.eps_r;

    if (classification_) {
        // A class never disappears: keep its most massive prototype even if
        // every prototype of the class went idle.
        std::set<std::string> labels;
        for (const auto& p : prototypes_) labels.insert(*p.label);
        for (const auto& lbl : labels) {
            bool any_kept = false;
            std::size_t best = k;
            for (std::size_t i = 0; i < k; ++i) {
                if (*prototypes_[i].label != lbl) continue;
                if (keep[i]) any_kept = true;
                if (best == k || prototypes_[i].rho > prototypes_[best].rho) best = i;
            }
            if (!any_kept && best < k) keep[best] = true;
        }
    } else {
        if (std::none_of(keep.begin(), keep.end(), [](bool b) { return b; })) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < k; ++i)
                if (prototypes_[i].rho > prototypes_[best].rho) best = i;
            keep[best] = true;
        }
    }

    std::vector<std::size_t> new_index(k, ResizeLog::kRemoved);
    std::vector<Prototype> kept;
    kept.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!keep[i]) continue;
        new_index[i] = kept.size();
        kept.push_back(std::move(prototypes_[i]));
    }
    prototypes_ = std::move(kept);
    renormalize_mass();
    if (log) {
        log->parent_of_new.clear();
        log->absorbed_into.clear();
        log->old_rho.clear();
        log->new_index_of_old = std::move(new_index);
    }
}

void OdaModel::renormalize_mass() {
    const double total = total_mass();
    if (!(total > 0.0)) throw DegenerateModel("total prototype mass is not positive");
    for (auto& p : prototypes_) {
        p.rho /= total;
        p.sigma = scaled(p.mu, p.rho);
    }
}

void OdaModel::lower_temperature() {
    LevelRecord rec;
    rec.temperature = temperature_;
    rec.k_effective = prototypes_.size();
    rec.distortion =
        level_distortion_n_ > 0 ? level_distortion_sum_ / static_cast<double>(level_distortion_n_)
                                : 0.0;
    rec.obs_used = obs_count_level_;
    rec.wall_ms = static_cast<double>(now_ns() - level_start_ns_) / 1e6;
    rec.forced_cutoff = forced_cutoff_;
    history_.push_back(std::move(rec));

    if (schedule_.lambda_cooling) {
        const double lam = temperature_ / (1.0 + temperature_);
        const double lam_next = schedule_.gamma * lam;
        temperature_ = lam_next / (1.0 - lam_next);
    } else {
        temperature_ *= schedule_.gamma;
    }
    ++level_index_;
}

OdaModel::Snapshot OdaModel::to_snapshot() const {
    return Snapshot{divergence_, schedule_, temperature_, prototypes_, history_, level_index_};
}

OdaModel OdaModel::from_snapshot(Snapshot snap, std::uint64_t rng_seed) {
    OdaModel m(std::move(snap.divergence), snap.schedule, rng_seed);
    m.temperature_ = snap.temperature;
    m.prototypes_ = std::move(snap.prototypes);
    m.history_ = std::move(snap.history);
    m.level_index_ = snap.level_index;
    if (m.prototypes_.empty()) throw DegenerateModel("snapshot has no prototypes");
    m.classification_ = true;
    for (auto& p : m.prototypes_) {
        m.divergence_.require_valid(p.mu);
        if (!(p.rho > 0.0)) throw DegenerateModel("snapshot prototype has non-positive mass");
        p.sigma = scaled(p.mu, p.rho);
        if (!p.label) m.classification_ = false;
    }
    for (const auto& rec : m.history_) m.obs_count_total_ += rec.obs_used;
    m.start_level_tracking();
    return m;
}

}  // namespace oda
