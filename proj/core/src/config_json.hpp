#pragma once

// Internal JSON helpers shared by experiment and sweep parsing.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "overgrad/experiment.hpp"

namespace overgrad::detail {

using nlohmann::json;

/// Reads an ExperimentConfig object, appending one message per problem.
ExperimentConfig config_from_object(const json& root, std::vector<std::string>& problems);
json config_to_object(const ExperimentConfig& config);

}  // namespace overgrad::detail
