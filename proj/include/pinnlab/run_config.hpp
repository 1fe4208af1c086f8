#pragma once

#include <string>

#include <json.hpp>

#include "pinnlab/network.hpp"
#include "pinnlab/problems.hpp"
#include "pinnlab/training.hpp"

namespace pinnlab {

/// Everything needed to reproduce one training run.
struct RunConfig {
    std::string preset_name; // informational (where the config came from)
    ProblemConfig problem;
    NetworkConfig network;
    TrainConfig train;
    int eval_n0 = 0, eval_n1 = 0; // 0 = problem default
};

/// Strict parser: unknown keys anywhere are a ConfigError, so typos in
/// presets fail loudly instead of silently training the wrong thing.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

RunConfig load_run_config_file(const std::string& path);

/// Fills eval_n0/eval_n1 with problem defaults if unset.
void finalize_eval_shape(RunConfig& cfg);

} // namespace pinnlab
