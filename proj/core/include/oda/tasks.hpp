#pragma once

#include <set>
#include <string>
#include <vector>

#include "oda/model.hpp"

namespace oda {

struct LabeledDataset {
    std::vector<Observation> rows;
    std::set<std::string> classes;
    std::size_t dimension = 0;

    bool labeled() const { return !classes.empty(); }
};

// Index of the nearest prototype under the model's divergence; ties break to
// the lowest index.
std::size_t quantize(const OdaModel& model, const Vec& x);

// Label of the prototype with the largest Gibbs membership. At vanishing
// temperature this coincides with the label of quantize().
std::string predict_class(const OdaModel& model, const Vec& x);

// Mean over rows of the minimum divergence to any prototype.
double average_distortion(const OdaModel& model, const LabeledDataset& data);

// Fraction of rows whose predicted class equals the row label.
double accuracy(const OdaModel& model, const LabeledDataset& data);

}  // namespace oda
