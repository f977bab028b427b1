#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "banditstream/environments.hpp"
#include "banditstream/harness.hpp"
#include "banditstream/policies_stochastic.hpp"

using namespace banditstream;

namespace {

std::unique_ptr<Policy> make_stochastic(StochasticKind kind) {
  StochasticPolicyConfig cfg;
  cfg.kind = kind;
  return std::make_unique<StochasticPolicy>(cfg);
}

}  // namespace

TEST_CASE("oracle policy has identically zero regret") {
  StationaryEnv env({0.9, 0.5, 0.1}, StationaryDist::Gaussian, 0.3, {});
  OraclePolicy pol(&env);
  const RunResult res = run_episode(pol, env, 100, 2, 3);
  for (double g : res.cum_regret) CHECK(g == 0.0);
}

TEST_CASE("random policy regret matches the closed form") {
  // K = 2, means (1, 0), k = 1: expected cumulative regret at T is T/2
  const int T = 200, runs = 1000;
  auto make_env = []() {
    return std::make_unique<StationaryEnv>(std::vector<double>{1.0, 0.0},
                                           StationaryDist::Gaussian, 0.1,
                                           ObservationProcess{});
  };
  auto make_policy = [](Environment*) { return make_stochastic(StochasticKind::Random); };
  const auto results = run_many(make_policy, make_env, T, 1, runs, 77, 2);
  double mean = 0.0;
  for (const auto& r : results) mean += r.cum_regret.back();
  mean /= runs;
  // regret = 1 + Binomial(T-2, 1/2) after the two forced cold-start rounds;
  // the tolerance is 3 standard errors
  const double se = std::sqrt((T - 2) / 4.0 / runs);
  CHECK(std::abs(mean - T / 2.0) < 3.0 * se);
}

TEST_CASE("recorded trajectories hold the round logs and oracle values") {
  StationaryEnv env({0.9, 0.5, 0.1}, StationaryDist::Bernoulli, 0.0, {});
  auto pol = make_stochastic(StochasticKind::UCB);
  Trajectory traj;
  const RunResult res = run_episode(*pol, env, 50, 2, 11, &traj);
  REQUIRE(traj.rounds.size() == 50);
  REQUIRE(traj.oracle_values.size() == 50);
  double cum = 0.0;
  for (size_t t = 0; t < traj.rounds.size(); ++t) {
    const RoundLog& r = traj.rounds[t];
    CHECK(r.t == static_cast<int>(t) + 1);
    CHECK(r.selected.size() == 2);
    CHECK(r.rewards.size() == 2);
    CHECK(traj.oracle_values[t] == doctest::Approx(1.4));  // two best means
    for (double v : r.rewards) cum += v;
  }
  CHECK(cum == doctest::Approx(res.cum_reward.back()));
  // replay produces the identical trajectory
  StationaryEnv env2({0.9, 0.5, 0.1}, StationaryDist::Bernoulli, 0.0, {});
  auto pol2 = make_stochastic(StochasticKind::UCB);
  Trajectory traj2;
  run_episode(*pol2, env2, 50, 2, 11, &traj2);
  for (size_t t = 0; t < traj.rounds.size(); ++t) {
    CHECK(traj.rounds[t].selected == traj2.rounds[t].selected);
    CHECK(traj.rounds[t].rewards == traj2.rounds[t].rewards);
  }
}

TEST_CASE("episodes replay exactly and pulls sum to k T") {
  StationaryEnv env({0.1, 0.4, 0.7, 0.2}, StationaryDist::Bernoulli, 0.0, {});
  auto p1 = make_stochastic(StochasticKind::UCB);
  auto p2 = make_stochastic(StochasticKind::UCB);
  const RunResult a = run_episode(*p1, env, 300, 2, 42);
  StationaryEnv env2({0.1, 0.4, 0.7, 0.2}, StationaryDist::Bernoulli, 0.0, {});
  const RunResult b = run_episode(*p2, env2, 300, 2, 42);
  CHECK(a.cum_reward == b.cum_reward);
  CHECK(a.cum_regret == b.cum_regret);
  CHECK(a.pulls == b.pulls);
  long long total = 0;
  for (long long p : a.pulls) total += p;
  CHECK(total == 600);
}

TEST_CASE("stationary regret identity against per-arm gap counts") {
  const std::vector<double> means = {0.9, 0.7, 0.55, 0.3};
  StationaryEnv env(means, StationaryDist::Bernoulli, 0.0, {});
  auto pol = make_stochastic(StochasticKind::TsBernoulli);
  const int k = 2;
  const RunResult res = run_episode(*pol, env, 500, k, 9);
  // mean of the k best
  const double mu_star = (0.9 + 0.7) / 2.0;
  double expect = 0.0;
  for (size_t i = 0; i < means.size(); ++i)
    expect += static_cast<double>(res.pulls[i]) * (mu_star - means[i]);
  CHECK(res.cum_regret.back() == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("pseudo-regret is nonnegative for every policy/environment pair") {
  PeriodicEnv env(6, 20, 4, 5, 1.0, {});
  auto pol = make_stochastic(StochasticKind::TsGaussian);
  const RunResult res = run_episode(*pol, env, 80, 2, 5);
  double prev = 0.0;
  for (double g : res.cum_regret) {
    CHECK(g >= prev - 1e-12);  // per-round gaps are nonnegative by the oracle definition
    prev = g;
  }
}

TEST_CASE("aggregate means, stds and quantiles") {
  RunResult a, b;
  a.cum_reward = {1.0, 2.0};
  a.cum_regret = {0.0, 0.0};
  b.cum_reward = {3.0, 4.0};
  b.cum_regret = {0.0, 2.0};
  const Aggregate single = aggregate({a});
  CHECK(single.reward_std[0] == 0.0);
  const Aggregate both = aggregate({a, b});
  CHECK(both.reward_mean[0] == doctest::Approx(2.0));
  CHECK(both.reward_mean[1] == doctest::Approx(3.0));
  CHECK(both.final_regret.mean == doctest::Approx(1.0));

  std::vector<RunResult> five;
  for (int i = 1; i <= 5; ++i) {
    RunResult r;
    r.cum_reward = {static_cast<double>(i)};
    r.cum_regret = {0.0};
    five.push_back(r);
  }
  const Aggregate q = aggregate(five);
  CHECK(q.final_reward.min == doctest::Approx(1.0));
  CHECK(q.final_reward.q1 == doctest::Approx(2.0));
  CHECK(q.final_reward.median == doctest::Approx(3.0));
  CHECK(q.final_reward.q3 == doctest::Approx(4.0));
  CHECK(q.final_reward.max == doctest::Approx(5.0));

  RunResult bad;
  bad.cum_reward = {1.0};
  bad.cum_regret = {0.0};
  CHECK_THROWS_AS(aggregate({a, bad}), LengthMismatch);
}

TEST_CASE("parallel runs equal sequential runs") {
  auto make_env = []() {
    return std::make_unique<StationaryEnv>(std::vector<double>{0.8, 0.4, 0.2},
                                           StationaryDist::Bernoulli, 0.0,
                                           ObservationProcess{});
  };
  auto make_policy = [](Environment*) { return make_stochastic(StochasticKind::UCB); };
  const auto seq = run_many(make_policy, make_env, 100, 1, 8, 5, 1);
  const auto par = run_many(make_policy, make_env, 100, 1, 8, 5, 4);
  for (size_t r = 0; r < seq.size(); ++r) {
    CHECK(seq[r].cum_reward == par[r].cum_reward);
    CHECK(seq[r].cum_regret == par[r].cum_regret);
  }
}

TEST_CASE("results csv round-trips and keeps the column order") {
  CellResult cell;
  cell.policy = "ucb";
  cell.env = "stationary_bernoulli";
  RunResult r;
  r.cum_reward = {0.1, 0.30000000000000004, 1.7};
  r.cum_regret = {0.0, 0.2, 0.45};
  cell.runs = {r};
  cell.agg = aggregate(cell.runs);
  const std::string path = "test_results.csv";
  write_results_csv(path, {cell}, 1);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "run,t,policy,env,cum_reward,cum_regret");
  std::string line;
  int t = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 6);
    CHECK(std::stoi(fields[0]) == 0);
    CHECK(std::stoi(fields[1]) == t + 1);
    CHECK(std::stod(fields[4]) == r.cum_reward[static_cast<size_t>(t)]);
    CHECK(std::stod(fields[5]) == r.cum_regret[static_cast<size_t>(t)]);
    ++t;
  }
  CHECK(t == 3);
  std::remove(path.c_str());

  // thinned emission keeps the final round
  write_results_csv(path, {cell}, 2);
  std::ifstream in2(path);
  int rows = 0;
  std::getline(in2, header);
  while (std::getline(in2, line)) ++rows;
  CHECK(rows == 2);  // t = 2 and t = 3
  std::remove(path.c_str());
}

TEST_CASE("final csv and manifest") {
  CellResult cell;
  cell.policy = "ucb";
  cell.env = "e";
  RunResult r;
  r.cum_reward = {1.0};
  r.cum_regret = {0.5};
  cell.runs = {r, r};
  cell.agg = aggregate(cell.runs);
  const std::string path = "test_final.csv";
  write_final_csv(path, {cell});
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  CHECK(header ==
        "policy,env,runs,final_reward_mean,final_reward_std,final_regret_mean,final_regret_std");
  std::getline(in, row);
  CHECK(row == "ucb,e,2,1,0,0.5,0");
  std::remove(path.c_str());

  nlohmann::json manifest = {{"base_seed", 42}, {"version", "test"}};
  write_manifest("test_manifest.json", manifest);
  std::ifstream jin("test_manifest.json");
  nlohmann::json parsed;
  jin >> parsed;
  CHECK(parsed.at("base_seed") == 42);
  std::remove("test_manifest.json");
}

TEST_CASE("format_double round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 12345.6789, 1e-12, -0.30000000000000004}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
