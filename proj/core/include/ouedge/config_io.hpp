#pragma once

// JSON experiment configuration. The accepted document is described in
// docs/config.schema.json; validate_config() enforces the same rules and
// reports the offending path.
//
//   {
//     "model":  {"lambda": 1, "gamma": 0, "beta": 1, "rho": 0.5},
//     "driver": {"type": "compound_poisson_exp", "b": 1, "c": 1, "alpha": 1},
//     "T_grid": [5, 10, 20], "p_orders": [2, 3, 4],
//     "n_samples": 100000, "seed": 42, "test_points": [-1, 0, 1]
//   }

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ouedge/harness.hpp"

namespace ouedge {

using nlohmann::json;

// Throws ConfigError naming the first offending JSON path.
void validate_config(const json& cfg);

ModelParams params_from_json(const json& model);
DriverSpec driver_from_json(const json& driver);
json driver_to_json(const DriverSpec& d);

// Validates and converts; fields missing from the document take their defaults.
ExperimentConfig experiment_from_json(const json& cfg);

// Applies `dot.path=value` (array elements as `a.1` or `a[1]`); the value is parsed as JSON when possible and kept
// as a string otherwise. Throws ConfigError on a malformed override.
void apply_override(json& cfg, std::string_view assignment);

// Hex FNV-1a of the canonical dump, ignoring execution-only keys (workers).
// Stable under reordering of object keys.
std::string config_hash(const json& cfg);

json load_config_file(const std::string& path);

}  // namespace ouedge
