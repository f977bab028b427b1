#include "banditstream/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace banditstream {

RunResult run_episode(Policy& policy, Environment& env, int T, int k,
                      std::uint64_t seed, Trajectory* trajectory) {
  const auto start = std::chrono::steady_clock::now();
  if (trajectory != nullptr) {
    trajectory->rounds.clear();
    trajectory->oracle_values.clear();
    trajectory->rounds.reserve(static_cast<size_t>(T));
    trajectory->oracle_values.reserve(static_cast<size_t>(T));
  }
  Rng root(seed);
  env.reset(root.child(0));
  policy.reset(env.num_arms(), k, root.child(1));

  RunResult out;
  out.cum_reward.resize(static_cast<size_t>(T));
  out.cum_regret.resize(static_cast<size_t>(T));
  out.pulls.assign(static_cast<size_t>(env.num_arms()), 0);

  std::vector<ArmId> known;
  std::vector<ArmId> prev_selected;
  double cum_reward = 0.0, cum_regret = 0.0;
  const bool full_info = policy.wants_full_rewards() && env.has_full_rewards();

  for (int t = 1; t <= T; ++t) {
    for (ArmId i : env.newly_known(t)) known.push_back(i);
    std::sort(known.begin(), known.end());
    Observation obs = env.observe(t, prev_selected);
    std::vector<ArmId> selected = policy.select(t, known, obs);
    if (static_cast<int>(selected.size()) != k)
      throw Error("policy returned a selection of the wrong size");
    StepResult res = env.step(t, selected);

    RoundLog round;
    round.t = t;
    round.selected = selected;
    round.rewards = res.rewards;
    round.observed = std::move(obs.arms);
    round.contexts = std::move(obs.contexts);
    if (full_info) round.full_rewards = env.full_rewards(t);
    policy.update(round);
    if (trajectory != nullptr) {
      trajectory->rounds.push_back(round);
      trajectory->oracle_values.push_back(res.oracle_value);
    }

    double reward_sum = 0.0, truth_sum = 0.0;
    for (size_t j = 0; j < selected.size(); ++j) {
      reward_sum += res.rewards[j];
      truth_sum += res.truth[j];
      out.pulls[static_cast<size_t>(selected[j])] += 1;
    }
    cum_reward += reward_sum;
    cum_regret += res.oracle_value - truth_sum;
    out.cum_reward[static_cast<size_t>(t - 1)] = cum_reward;
    out.cum_regret[static_cast<size_t>(t - 1)] = cum_regret;
    prev_selected = std::move(selected);
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<RunResult> run_many(const PolicyFactory& make_policy,
                                const EnvFactory& make_env, int T, int k, int n_runs,
                                std::uint64_t base_seed, int jobs) {
  std::vector<RunResult> results(static_cast<size_t>(n_runs));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= n_runs) return;
      auto env = make_env();
      auto policy = make_policy(env.get());
      results[static_cast<size_t>(r)] =
          run_episode(*policy, *env, T, k, Rng::mix(base_seed, static_cast<std::uint64_t>(r)));
    }
  };
  const int n_threads = std::max(1, std::min(jobs, n_runs));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

namespace {

FinalStats final_stats(std::vector<double> finals) {
  FinalStats fs;
  const size_t n = finals.size();
  double sum = 0.0, sq = 0.0;
  for (double v : finals) {
    sum += v;
    sq += v * v;
  }
  fs.mean = sum / static_cast<double>(n);
  fs.stddev = n > 1 ? std::sqrt(std::max(0.0, (sq - sum * sum / static_cast<double>(n)) /
                                                  static_cast<double>(n - 1)))
                    : 0.0;
  std::sort(finals.begin(), finals.end());
  auto quantile = [&](double p) {
    const double idx = p * static_cast<double>(n - 1);
    const size_t lo = static_cast<size_t>(idx);
    const size_t hi = std::min(lo + 1, n - 1);
    const double frac = idx - static_cast<double>(lo);
    return finals[lo] * (1.0 - frac) + finals[hi] * frac;
  };
  fs.min = finals.front();
  fs.q1 = quantile(0.25);
  fs.median = quantile(0.5);
  fs.q3 = quantile(0.75);
  fs.max = finals.back();
  return fs;
}

}  // namespace

Aggregate aggregate(const std::vector<RunResult>& results) {
  if (results.empty()) throw LengthMismatch("aggregate: no runs");
  const size_t T = results.front().cum_reward.size();
  for (const auto& r : results)
    if (r.cum_reward.size() != T || r.cum_regret.size() != T)
      throw LengthMismatch("aggregate: runs have different horizons");
  Aggregate agg;
  agg.runs = static_cast<int>(results.size());
  const double n = static_cast<double>(results.size());
  agg.reward_mean.assign(T, 0.0);
  agg.regret_mean.assign(T, 0.0);
  agg.reward_std.assign(T, 0.0);
  agg.regret_std.assign(T, 0.0);
  for (const auto& r : results)
    for (size_t t = 0; t < T; ++t) {
      agg.reward_mean[t] += r.cum_reward[t];
      agg.regret_mean[t] += r.cum_regret[t];
    }
  for (size_t t = 0; t < T; ++t) {
    agg.reward_mean[t] /= n;
    agg.regret_mean[t] /= n;
  }
  if (results.size() > 1) {
    for (const auto& r : results)
      for (size_t t = 0; t < T; ++t) {
        const double dr = r.cum_reward[t] - agg.reward_mean[t];
        const double dg = r.cum_regret[t] - agg.regret_mean[t];
        agg.reward_std[t] += dr * dr;
        agg.regret_std[t] += dg * dg;
      }
    for (size_t t = 0; t < T; ++t) {
      agg.reward_std[t] = std::sqrt(agg.reward_std[t] / (n - 1.0));
      agg.regret_std[t] = std::sqrt(agg.regret_std[t] / (n - 1.0));
    }
  }
  std::vector<double> fin_r, fin_g;
  for (const auto& r : results) {
    fin_r.push_back(r.cum_reward.back());
    fin_g.push_back(r.cum_regret.back());
  }
  agg.final_reward = final_stats(std::move(fin_r));
  agg.final_regret = final_stats(std::move(fin_g));
  return agg;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_results_csv(const std::string& path, const std::vector<CellResult>& cells,
                       int every) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "run,t,policy,env,cum_reward,cum_regret\n";
  for (const auto& cell : cells) {
    for (size_t r = 0; r < cell.runs.size(); ++r) {
      const auto& run = cell.runs[r];
      const int T = static_cast<int>(run.cum_reward.size());
      for (int t = 1; t <= T; ++t) {
        if (t % every != 0 && t != T) continue;
        out << r << ',' << t << ',' << cell.policy << ',' << cell.env << ','
            << format_double(run.cum_reward[static_cast<size_t>(t - 1)]) << ','
            << format_double(run.cum_regret[static_cast<size_t>(t - 1)]) << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing " + path);
}

void write_final_csv(const std::string& path, const std::vector<CellResult>& cells) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "policy,env,runs,final_reward_mean,final_reward_std,final_regret_mean,"
         "final_regret_std\n";
  for (const auto& cell : cells) {
    out << cell.policy << ',' << cell.env << ',' << cell.agg.runs << ','
        << format_double(cell.agg.final_reward.mean) << ','
        << format_double(cell.agg.final_reward.stddev) << ','
        << format_double(cell.agg.final_regret.mean) << ','
        << format_double(cell.agg.final_regret.stddev) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

void write_manifest(const std::string& path, const nlohmann::json& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace banditstream
