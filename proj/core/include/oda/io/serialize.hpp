#pragma once

#include <filesystem>

#include <json.hpp>

#include "oda/model.hpp"
#include "oda/rl.hpp"

namespace oda {

// Versioned model snapshot:
//   {version, divergence, temperature, schedule, prototypes:[{mu,label,rho}],
//    history:[...]}
// Doubles round-trip losslessly (shortest 17-significant-digit form).
nlohmann::json model_to_json(const OdaModel& model);
OdaModel model_from_json(const nlohmann::json& j, std::uint64_t rng_seed);

void save_model(const OdaModel& model, const std::filesystem::path& path);
OdaModel load_model(const std::filesystem::path& path, std::uint64_t rng_seed);

// RL checkpoint: the aggregator snapshot in the same envelope plus the Q
// table and visit counts.
nlohmann::json checkpoint_to_json(const AggregateQ& agg);
AggregateQ checkpoint_from_json(const nlohmann::json& j, std::uint64_t rng_seed);

void save_checkpoint(const AggregateQ& agg, const std::filesystem::path& path);
AggregateQ load_checkpoint(const std::filesystem::path& path, std::uint64_t rng_seed);

}  // namespace oda
