#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "banditstream/core.hpp"
#include "banditstream/harness.hpp"

namespace banditstream {

// Minimal TOML reader covering the experiment-file subset: tables, arrays of
// tables, dotted keys, strings, numbers, booleans and scalar arrays.
nlohmann::json parse_toml(const std::string& text);

// .toml or .json by extension.
nlohmann::json load_config_file(const std::string& path);

// Applies `--set key=value` (dotted path, numeric segments index arrays).
void apply_override(nlohmann::json& cfg, const std::string& key, const std::string& value);

// Structural and semantic validation; throws ConfigError. Unknown keys are
// rejected with their location.
void validate_config(const nlohmann::json& cfg);

struct ExperimentSpec {
  nlohmann::json raw;
  int T = 0;
  int k = 1;
  int runs = 1;
  std::uint64_t seed = 1;
  int emit_every = 1;
  std::string name;
  nlohmann::json env;
  nlohmann::json obs;
  std::vector<nlohmann::json> policies;
  std::vector<std::pair<std::string, nlohmann::json>> sweep;  // key -> array
};

// Validates and extracts; BANDITSTREAM_SEED (when set) overrides the seed.
ExperimentSpec parse_experiment(const nlohmann::json& cfg);

std::unique_ptr<Environment> make_environment(const nlohmann::json& env,
                                              const nlohmann::json& obs);
std::unique_ptr<Policy> make_policy(const nlohmann::json& policy, Environment* env,
                                    const ExperimentSpec& exp);
std::string policy_label(const nlohmann::json& policy);

// Cartesian product of the sweep grid applied to the base config; returns
// (cell name, config) pairs. Empty grid yields the base config alone.
std::vector<std::pair<std::string, nlohmann::json>> expand_sweep(const nlohmann::json& cfg);

// Optimal nonstationary tunings when the number of change points is known.
double discounted_ucb_gamma_helper(long long T, long long change_points);
int sliding_window_tau_helper(long long T, long long change_points);

}  // namespace banditstream
