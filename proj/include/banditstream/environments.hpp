#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "banditstream/core.hpp"

namespace banditstream {

// True iff lambda_max(A^T A) <= 1 + 1e-9, by power iteration.
bool spectral_check(const Eigen::MatrixXd& A);

// Weights over the five event kinds {tweet, retweet-out, reply-out,
// retweet-in, reply-in}; reward = tanh(sum_k alpha_k * count_k).
struct RewardWeights {
  std::array<double, 5> alpha{0.1, 0.0, 0.0, 0.1, 0.1};
  double reward(const std::array<long long, 5>& counts) const;
};

enum class StationaryDist { Gaussian, Bernoulli };

class StationaryEnv : public Environment {
 public:
  StationaryEnv(std::vector<double> means, StationaryDist dist, double sigma,
                ObservationProcess obs);

  void reset(Rng rng) override;
  int num_arms() const override { return static_cast<int>(means_.size()); }
  Observation observe(int t, const std::vector<ArmId>& prev_selected) override;
  StepResult step(int t, const std::vector<ArmId>& selected) override;
  std::vector<ArmId> oracle_set(int t, int k) override;
  nlohmann::json manifest(bool dump_truth) const override;
  std::string name() const override;

 private:
  std::vector<double> means_;
  StationaryDist dist_;
  double sigma_;
  ObservationProcess obs_;
  Rng rng_{0};
};

// Fixed hidden profiles mu_i, regression weights beta; only truncated-Gaussian
// samples of the profiles are revealed, per the observation process.
class LinearProfileEnv : public Environment {
 public:
  LinearProfileEnv(int K, int d, double L, double S, double sigma_profile,
                   double reward_noise_sd, ObservationProcess obs);

  void reset(Rng rng) override;
  int num_arms() const override { return K_; }
  int context_dim() const override { return d_; }
  Observation observe(int t, const std::vector<ArmId>& prev_selected) override;
  StepResult step(int t, const std::vector<ArmId>& selected) override;
  std::vector<ArmId> oracle_set(int t, int k) override;
  nlohmann::json manifest(bool dump_truth) const override;
  std::string name() const override;

  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::VectorXd& profile(ArmId i) const { return profiles_[static_cast<size_t>(i)]; }

 private:
  int K_, d_;
  double L_, S_, sigma_profile_, reward_noise_sd_;
  ObservationProcess obs_;
  Rng rng_{0};
  Eigen::VectorXd beta_;
  std::vector<Eigen::VectorXd> profiles_;
  std::vector<double> expected_;  // mu_i^T beta
};

// Per-arm context law x_{i,t} ~ N(mu_i, tau_i^{-1} I); rewards x^T beta + noise.
// Contexts are drawn for every arm each round and revealed per the
// observation process, so the oracle is defined for unobserved arms too.
class VariableContextEnv : public Environment {
 public:
  VariableContextEnv(int K, int d, double a0, double b0, double S,
                     double reward_sigma, ObservationProcess obs);

  void reset(Rng rng) override;
  int num_arms() const override { return K_; }
  int context_dim() const override { return d_; }
  Observation observe(int t, const std::vector<ArmId>& prev_selected) override;
  StepResult step(int t, const std::vector<ArmId>& selected) override;
  std::vector<ArmId> oracle_set(int t, int k) override;
  nlohmann::json manifest(bool dump_truth) const override;
  std::string name() const override;

  const Eigen::VectorXd& beta() const { return beta_; }

 private:
  void ensure_round(int t);

  int K_, d_;
  double a0_, b0_, S_, reward_sigma_;
  ObservationProcess obs_;
  Rng rng_{0};
  Eigen::VectorXd beta_;
  std::vector<double> tau_;
  std::vector<Eigen::VectorXd> mu_;
  int current_t_ = 0;
  std::vector<Eigen::VectorXd> contexts_;  // x_{i,t} for the current round
  std::vector<double> values_;             // x_{i,t}^T beta
};

// VAR(1) reward model r_t = Theta (R_{t-1}, 1) + noise. The inter-arm block
// is rescaled until its spectral norm passes the non-divergence check; bias
// weights are kept as drawn (the full matrix with a nonzero bias column
// cannot satisfy the strict check).
class RecurrentVarEnv : public Environment {
 public:
  RecurrentVarEnv(int K, double sigma, double alpha_prior, double mu_prior,
                  ObservationProcess obs);

  void reset(Rng rng) override;
  int num_arms() const override { return K_; }
  Observation observe(int t, const std::vector<ArmId>& prev_selected) override;
  StepResult step(int t, const std::vector<ArmId>& selected) override;
  std::vector<ArmId> oracle_set(int t, int k) override;
  bool has_full_rewards() const override { return true; }
  std::vector<double> full_rewards(int t) const override;
  nlohmann::json manifest(bool dump_truth) const override;
  std::string name() const override;

  const Eigen::MatrixXd& theta() const { return theta_; }

 private:
  void ensure_round(int t);

  int K_;
  double sigma_, alpha_prior_, mu_prior_;
  ObservationProcess obs_;
  Rng rng_{0};
  Eigen::MatrixXd theta_;  // K x (K+1), last column holds the bias weights
  int current_t_ = 0;
  Eigen::VectorXd rewards_now_, rewards_prev_;
  Eigen::VectorXd truth_now_;
};

class PeriodicEnv : public Environment {
 public:
  PeriodicEnv(int K, int cycle_len, int n_periods, int period_len,
              double reward_sigma, ObservationProcess obs);

  void reset(Rng rng) override;
  int num_arms() const override { return K_; }
  Observation observe(int t, const std::vector<ArmId>& prev_selected) override;
  StepResult step(int t, const std::vector<ArmId>& selected) override;
  std::vector<ArmId> oracle_set(int t, int k) override;
  nlohmann::json manifest(bool dump_truth) const override;
  std::string name() const override;

  int period_of(int t) const;  // 1-based
  bool active(ArmId i, int t) const;

 private:
  int K_, cycle_len_, n_periods_, period_len_;
  double reward_sigma_;
  ObservationProcess obs_;
  Rng rng_{0};
  std::vector<double> means_;
  std::vector<int> arm_period_;
};

// Each arm runs its own cycle of per_i periods of it_i iterations, active in
// exactly one period; per_i in {2,3,4,5}, it_i in {10,20,30,40}.
class PeriodicRandomEnv : public Environment {
 public:
  PeriodicRandomEnv(int K, double reward_sigma, ObservationProcess obs);

  void reset(Rng rng) override;
  int num_arms() const override { return K_; }
  Observation observe(int t, const std::vector<ArmId>& prev_selected) override;
  StepResult step(int t, const std::vector<ArmId>& selected) override;
  std::vector<ArmId> oracle_set(int t, int k) override;
  nlohmann::json manifest(bool dump_truth) const override;
  std::string name() const override;

  bool active(ArmId i, int t) const;

 private:
  int K_;
  double reward_sigma_;
  ObservationProcess obs_;
  Rng rng_{0};
  std::vector<double> means_;
  std::vector<int> per_, it_, arm_period_;
};

// Replays a recorded event-count log. CSV header `t,arm,c0,c1,c2,c3,c4`;
// missing rows mean all-zero counts; reward is the tanh-weighted count sum.
class TraceReplayEnv : public Environment {
 public:
  TraceReplayEnv(const std::string& path, RewardWeights weights, int K, int T,
                 bool dynamic_arms, int max_new, ObservationProcess obs);

  void reset(Rng rng) override;
  int num_arms() const override { return K_; }
  Observation observe(int t, const std::vector<ArmId>& prev_selected) override;
  StepResult step(int t, const std::vector<ArmId>& selected) override;
  std::vector<ArmId> oracle_set(int t, int k) override;
  std::vector<ArmId> newly_known(int t) override;
  nlohmann::json manifest(bool dump_truth) const override;
  std::string name() const override;

  double reward_at(int t, ArmId i) const;

 private:
  std::string path_;
  RewardWeights weights_;
  int K_, T_;
  bool dynamic_arms_;
  int max_new_;
  ObservationProcess obs_;
  Rng rng_{0};
  std::vector<std::vector<double>> rewards_;   // [t-1][arm]
  std::vector<int> first_active_;              // per arm; T_+1 if never
  std::vector<ArmId> pending_;                 // arrival queue under max_new
  std::vector<char> known_;
  int arrivals_t_ = 0;
};

}  // namespace banditstream
