#include <doctest.h>

#include <cstdlib>

#include "banditstream/config.hpp"
#include "banditstream/presets.hpp"

using namespace banditstream;
using nlohmann::json;

TEST_CASE("toml parser handles the config subset") {
  const std::string text = R"(
# comment
title = "demo"  # trailing comment

[experiment]
T = 100
k = 2
ratio = 0.5
flag = true

[env]
kind = "periodic"
"quoted.key" = 1

[[policy]]
name = "ucb"
b = 1.0

[[policy]]
name = "moss"

[sweep]
"obs.p" = [0.1, 0.5,
           1.0]
)";
  const json cfg = parse_toml(text);
  CHECK(cfg.at("title") == "demo");
  CHECK(cfg.at("experiment").at("T") == 100);
  CHECK(cfg.at("experiment").at("ratio") == 0.5);
  CHECK(cfg.at("experiment").at("flag") == true);
  CHECK(cfg.at("policy").size() == 2);
  CHECK(cfg.at("policy")[0].at("name") == "ucb");
  CHECK(cfg.at("sweep").at("obs.p").size() == 3);

  CHECK_THROWS_AS(parse_toml("key value"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = \"unterminated"), ConfigError);
}

TEST_CASE("overrides with dotted keys and array indices") {
  json cfg = parse_toml(R"(
[experiment]
T = 10
k = 1

[env]
kind = "periodic"

[[policy]]
name = "ucb"
b = 1.0
)");
  apply_override(cfg, "experiment.T", "100");
  CHECK(cfg["experiment"]["T"] == 100);
  apply_override(cfg, "policy.0.b", "2.5");
  CHECK(cfg["policy"][0]["b"] == 2.5);
  apply_override(cfg, "env.kind", "periodic_random");
  CHECK(cfg["env"]["kind"] == "periodic_random");
  CHECK_THROWS_AS(apply_override(cfg, "policy.7.b", "1"), ConfigError);
}

TEST_CASE("validation rejects unknown keys and bad shapes") {
  json good = parse_toml(R"(
[experiment]
T = 50
k = 2

[env]
kind = "stationary_bernoulli"
K = 5

[[policy]]
name = "ucb"
)");
  CHECK_NOTHROW(validate_config(good));

  json bad = good;
  bad["experiment"]["bogus"] = 1;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = good;
  bad["policy"][0]["name"] = "nonsense";
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = good;
  bad["policy"][0]["tau"] = 5;  // not a ucb key
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = good;
  bad["experiment"]["k"] = 50;  // exceeds K
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = good;
  bad["sweep"]["not.a.path"] = json::array({1, 2});
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = good;
  bad.erase("policy");
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("every shipped preset validates") {
  for (const auto& name : preset_names()) {
    const json cfg = parse_toml(preset_toml(name));
    CHECK_NOTHROW(validate_config(cfg));
    CHECK_NOTHROW(parse_experiment(cfg));
  }
  CHECK(preset_names().size() == 7);
  CHECK(has_preset("stationary_topic"));
  CHECK(has_preset("samplin_xp"));
  CHECK(has_preset("hidden_xp"));
  CHECK(has_preset("rrts_xp1"));
  CHECK(has_preset("rsts_xp2"));
  CHECK(has_preset("periodic"));
  CHECK(has_preset("periodic_random"));
}

TEST_CASE("sweep expansion is a cartesian product and empty behaves as run") {
  json cfg = parse_toml(R"(
[experiment]
T = 10
k = 1

[env]
kind = "stationary_bernoulli"
K = 3

[obs]
mode = "bernoulli"
p = 1.0

[[policy]]
name = "ucb"
b = 1.0

[sweep]
"obs.p" = [0.1, 0.9]
"policy.0.b" = [1.0, 2.0]
)");
  const auto cells = expand_sweep(cfg);
  CHECK(cells.size() == 4);
  for (const auto& [label, cell] : cells) {
    CHECK(!label.empty());
    CHECK(!cell.contains("sweep"));
  }
  cfg.erase("sweep");
  CHECK(expand_sweep(cfg).size() == 1);
}

TEST_CASE("experiment spec picks up the seed override from the environment") {
  json cfg = parse_toml(R"(
[experiment]
T = 10
k = 1
seed = 5

[env]
kind = "stationary_bernoulli"
K = 3

[[policy]]
name = "ucb"
)");
  setenv("BANDITSTREAM_SEED", "777", 1);
  const ExperimentSpec spec = parse_experiment(cfg);
  CHECK(spec.seed == 777);
  unsetenv("BANDITSTREAM_SEED");
  const ExperimentSpec spec2 = parse_experiment(cfg);
  CHECK(spec2.seed == 5);
}

TEST_CASE("factories build every preset policy and run a couple of rounds") {
  for (const auto& name : preset_names()) {
    const json cfg = parse_toml(preset_toml(name));
    ExperimentSpec spec = parse_experiment(cfg);
    auto env = make_environment(spec.env, spec.obs);
    env->reset(Rng(1));
    for (const auto& pol : spec.policies) {
      auto policy = make_policy(pol, env.get(), spec);
      CHECK(!policy_label(pol).empty());
    }
  }
}

TEST_CASE("nonstationary helper formulas") {
  CHECK(discounted_ucb_gamma_helper(10000, 100) == doctest::Approx(1.0 - 0.1 / 4.0));
  CHECK(sliding_window_tau_helper(10000, 200) ==
        static_cast<int>(2.0 * std::sqrt(10000.0 * std::log(10000.0) / 200.0)));
}
