#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "banditstream/core.hpp"

namespace banditstream {

struct RunResult {
  std::vector<double> cum_reward;
  std::vector<double> cum_regret;
  std::vector<long long> pulls;  // N_{i,T}
  double wall_seconds = 0.0;
};

// Selects the environment's ground-truth best-k set every round.
class OraclePolicy : public Policy {
 public:
  explicit OraclePolicy(Environment* env) : env_(env) {}
  void reset(int, int k, Rng) override { k_ = k; }
  std::vector<ArmId> select(int t, const std::vector<ArmId>&, const Observation&) override {
    return env_->oracle_set(t, k_);
  }
  void update(const RoundLog& round) override { check_round_order(round.t); }
  std::string name() const override { return "oracle"; }

 private:
  Environment* env_;
  int k_ = 1;
};

// observe -> select -> reward -> update for t = 1..T; deterministic given
// seed. When `trajectory` is given, the per-round logs and oracle values are
// recorded there.
RunResult run_episode(Policy& policy, Environment& env, int T, int k,
                      std::uint64_t seed, Trajectory* trajectory = nullptr);

using PolicyFactory = std::function<std::unique_ptr<Policy>(Environment*)>;
using EnvFactory = std::function<std::unique_ptr<Environment>()>;

// n_runs independent episodes; run r uses seed mix(base_seed, r). Runs execute
// on `jobs` threads and merge by run index, so parallel output equals
// sequential output bit for bit.
std::vector<RunResult> run_many(const PolicyFactory& make_policy,
                                const EnvFactory& make_env, int T, int k, int n_runs,
                                std::uint64_t base_seed, int jobs = 1);

struct FinalStats {
  double mean = 0.0, stddev = 0.0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct Aggregate {
  int runs = 0;
  std::vector<double> reward_mean, reward_std;
  std::vector<double> regret_mean, regret_std;
  FinalStats final_reward, final_regret;
};

Aggregate aggregate(const std::vector<RunResult>& results);

struct CellResult {
  std::string policy;
  std::string env;
  std::vector<RunResult> runs;
  Aggregate agg;
  double wall_seconds = 0.0;
};

// `run,t,policy,env,cum_reward,cum_regret`; LF endings, '.' decimals. Rows are
// thinned to every `every`-th round plus the final one.
void write_results_csv(const std::string& path, const std::vector<CellResult>& cells,
                       int every = 1);
// `policy,env,runs,final_reward_mean,final_reward_std,final_regret_mean,final_regret_std`
void write_final_csv(const std::string& path, const std::vector<CellResult>& cells);
void write_manifest(const std::string& path, const nlohmann::json& manifest);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace banditstream
