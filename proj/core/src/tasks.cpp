#include "oda/tasks.hpp"

#include <algorithm>

namespace oda {

std::size_t quantize(const OdaModel& model, const Vec& x) {
    if (model.prototype_count() == 0) throw DegenerateModel("model has no prototypes");
    const auto& protos = model.prototypes();
    std::size_t best = 0;
    double best_d = model.divergence().bregman(x, protos[0].mu);
    for (std::size_t i = 1; i < protos.size(); ++i) {
        const double d = model.divergence().bregman(x, protos[i].mu);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::string predict_class(const OdaModel& model, const Vec& x) {
    if (!model.classification_mode())
        throw UntrainedModel("predict_class requires a model whose prototypes all carry labels");
    const Vec p = model.gibbs_memberships(x);
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return *model.prototypes()[best].label;
}

double average_distortion(const OdaModel& model, const LabeledDataset& data) {
    if (data.rows.empty()) throw ConfigError("average_distortion over empty dataset");
    double sum = 0.0;
    for (const auto& row : data.rows) {
        const auto& protos = model.prototypes();
        double best = model.divergence().bregman(row.x, protos[0].mu);
        for (std::size_t i = 1; i < protos.size(); ++i)
            best = std::min(best, model.divergence().bregman(row.x, protos[i].mu));
        sum += best;
    }
    return sum / static_cast<double>(data.rows.size());
}

double accuracy(const OdaModel& model, const LabeledDataset& data) {
    if (data.rows.empty()) throw ConfigError("accuracy over empty dataset");
    std::size_t correct = 0;
    for (const auto& row : data.rows) {
        if (!row.label) throw ConfigError("accuracy requires labeled rows");
        if (predict_class(model, row.x) == *row.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.rows.size());
}

}  // namespace oda
