#pragma once

#include <limits>
#include <vector>

#include "oda/model.hpp"

namespace oda {

// Critical-temperature estimate per prototype: the root of
// det[I - T * H_phi(y) * C_{x|y}] = 0, i.e. 1 / lambda_max(H_phi(y) * C),
// with C the membership-weighted scatter of the samples around y.
// Returns +infinity for a prototype whose scatter is zero. Diagnostic only;
// splitting in training is detected by perturbation pairs, never by this.
std::vector<double> critical_temperature_diagnostic(const OdaModel& model,
                                                    const std::vector<Vec>& samples);

constexpr double kNoFiniteCriticalTemperature = std::numeric_limits<double>::infinity();

}  // namespace oda
