#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sharpcs/experiments.hpp"

namespace sharpcs {

// JSON run configuration. Every key is optional (defaults come from
// ExperimentConfig); unknown keys and wrong types throw kSchema.
//
// {
//   "experiment": "condition-sweep" | "restart-comparison",
//   "seed": 1, "threads": 1, "out_dir": "results", "record_wall_time": false,
//   "instance":   {"p", "k", "n_values", "delta", "trials", "exact_tolerance"},
//   "solver":     {"restart", "mu_schedule", "mu0", "target_gap", "stall_tolerance", "monotone"},
//   "condition":  {"eps1", "eps2", "gamma", "max_iters", "tol", "restarts", "power_iters", "trials"},
//   "comparison": {"budget", "cells", "seeds"}
// }

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

}  // namespace sharpcs
