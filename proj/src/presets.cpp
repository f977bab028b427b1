#include "banditstream/presets.hpp"

#include <map>

#include "banditstream/errors.hpp"

namespace banditstream {

namespace {

const std::map<std::string, const char*>& preset_map() {
  static const std::map<std::string, const char*> presets = {
      {"stationary_topic", R"TOML(
# Stationary Bernoulli sources, evenly spread means.
[experiment]
name = "stationary_topic"
T = 20000
k = 1
runs = 50
seed = 7
emit_every = 50
desk_scale = true

[env]
kind = "stationary_bernoulli"
K = 10
mean_min = 0.0
mean_max = 0.9

[[policy]]
name = "ucb"

[[policy]]
name = "cucbv"

[[policy]]
name = "moss"

[[policy]]
name = "ts_bernoulli"

[[policy]]
name = "random"
)TOML"},
      {"samplin_xp", R"TOML(
# Noisy hidden profiles; sweep the sample-delivery probability.
# Use `--set obs.mode=last_selected` for the selected-arm-only case.
[experiment]
name = "samplin_xp"
T = 1000
k = 1
runs = 50
seed = 11
emit_every = 10
desk_scale = true

[env]
kind = "linear_profile"
K = 50
d = 5
L = 1.0
S = 1.0
sigma_profile = 0.1
r_noise = 0.31622776601683794

[obs]
mode = "bernoulli"
p = 1.0

[sweep]
"obs.p" = [0.0, 0.05, 0.5, 1.0]

[[policy]]
name = "samplin_ucb"
R = 0.31622776601683794

[[policy]]
name = "ucb"

[[policy]]
name = "cucbv"

[[policy]]
name = "moss"
)TOML"},
      {"hidden_xp", R"TOML(
# Variable contexts with partial observation; variational hidden-context policy.
[experiment]
name = "hidden_xp"
T = 2000
k = 5
runs = 20
seed = 13
emit_every = 10
desk_scale = true

[env]
kind = "variable_context"
K = 50
d = 10
a0 = 2.0
b0 = 1.0
S = 1.0
reward_sigma = 1.0

[obs]
mode = "all"

[[policy]]
name = "hidden_linucb_vi"
window = 100
nbIt = 10

[[policy]]
name = "cucb"

[[policy]]
name = "cucbv"

[[policy]]
name = "moss"

[[policy]]
name = "ts_gaussian"

[[policy]]
name = "random"
)TOML"},
      {"rrts_xp1", R"TOML(
# VAR(1) rewards, small arm set, relational Thompson sampling.
[experiment]
name = "rrts_xp1"
T = 1000
k = 5
runs = 20
seed = 17
emit_every = 10
desk_scale = true

[env]
kind = "recurrent_var"
K = 30
sigma = 1.0
alpha_prior = 1.0
mu_prior = 0.0

[[policy]]
name = "oracle"

[[policy]]
name = "revealed_reward_ts"

[[policy]]
name = "rrts"
window = 200
nbIt = 10

[[policy]]
name = "ucb"

[[policy]]
name = "ts_gaussian"

[[policy]]
name = "discounted_ucb"
gamma = 0.75

[[policy]]
name = "sliding_window_ucb"
tau = 5

[[policy]]
name = "random"
)TOML"},
      {"rsts_xp2", R"TOML(
# VAR(1) rewards at a larger arm count; latent-state Thompson sampling.
[experiment]
name = "rsts_xp2"
T = 2000
k = 15
runs = 10
seed = 19
emit_every = 10
desk_scale = true

[env]
kind = "recurrent_var"
K = 60
sigma = 1.0
alpha_prior = 1.0
mu_prior = 0.0

[[policy]]
name = "oracle"

[[policy]]
name = "rsts"
d = 4
window = 100
nbIt = 10

[[policy]]
name = "ucb"

[[policy]]
name = "ts_gaussian"

[[policy]]
name = "random"
)TOML"},
      {"periodic", R"TOML(
# Shared 4-period cycles; latent-state policy with memory.
[experiment]
name = "periodic"
T = 3000
k = 15
runs = 10
seed = 23
emit_every = 10
desk_scale = true

[env]
kind = "periodic"
K = 60
cycle_len = 100
n_periods = 4
period_len = 25
reward_sigma = 1.0

[[policy]]
name = "oracle"

[[policy]]
name = "rsts"
label = "rsts_d4"
d = 4
sigma = 0.1
delta_lds = 0.1
window = 100
nbIt = 10

[[policy]]
name = "rsts"
label = "rsts_d2"
d = 2
sigma = 0.1
delta_lds = 0.1
window = 100
nbIt = 10

[[policy]]
name = "ucb"

[[policy]]
name = "cucbv"

[[policy]]
name = "ts_gaussian"

[[policy]]
name = "sliding_window_ucb"
tau = 200
)TOML"},
      {"periodic_random", R"TOML(
# Per-arm cycles of random length and period count.
[experiment]
name = "periodic_random"
T = 3000
k = 15
runs = 10
seed = 29
emit_every = 10
desk_scale = true

[env]
kind = "periodic_random"
K = 60
reward_sigma = 1.0

[[policy]]
name = "oracle"

[[policy]]
name = "rsts"
label = "rsts_d4"
d = 4
sigma = 0.1
delta_lds = 0.1
window = 100
nbIt = 10

[[policy]]
name = "rsts"
label = "rsts_d10"
d = 10
sigma = 0.1
delta_lds = 0.1
window = 100
nbIt = 10

[[policy]]
name = "ucb"

[[policy]]
name = "ts_gaussian"

[[policy]]
name = "sliding_window_ucb"
tau = 42
)TOML"},
  };
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : preset_map()) names.push_back(name);
  return names;
}

bool has_preset(const std::string& name) { return preset_map().count(name) > 0; }

std::string preset_toml(const std::string& name) {
  const auto it = preset_map().find(name);
  if (it == preset_map().end()) throw ConfigError("unknown preset: " + name);
  return it->second;
}

}  // namespace banditstream
