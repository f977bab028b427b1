#pragma once

#include <string>
#include <vector>

#include "banditstream/core.hpp"

namespace banditstream {

enum class StochasticKind {
  Random,
  EpsilonGreedy,
  UCB,
  CUCB,
  CUCBV,
  UcbDelta,
  MOSS,
  TsBernoulli,
  TsBounded,
  TsGaussian,
  DiscountedUCB,
  SlidingWindowUCB,
};

StochasticKind stochastic_kind_from_string(const std::string& name);
std::string to_string(StochasticKind kind);

struct StochasticPolicyConfig {
  StochasticKind kind = StochasticKind::UCB;
  double b = 1.0;          // reward upper bound
  double a = 1.0;          // CUCBV variance weight
  double c = 1.0;          // CUCBV linear weight
  double delta = 0.05;     // UCB-delta confidence
  long long T = 0;         // MOSS horizon
  int K = 0;               // MOSS arm count (0 = use episode arm count)
  double eps_c = 1.0;      // epsilon_t-greedy c
  double eps_d = 0.1;      // epsilon_t-greedy d (set by hand; gap unknowable)
  double gamma = 1.0;      // discount in (0, 1]
  int tau = 1;             // sliding window length
  double xi = 0.6;         // D-UCB / SW-UCB padding constant
  double ts_a = 0.0;       // Gaussian TS prior mean
  double ts_b = 1.0;       // Gaussian TS prior variance
  double ts_sigma = 1.0;   // Gaussian TS likelihood sd

  void validate() const;
};

// Index scores on sufficient statistics. All return +inf when the relevant
// count is zero (cold-start rule).
double ucb_score(const ArmStats& stats, long long t, double b);
double cucbv_score(const ArmStats& stats, long long t, double a, double c, double b);
double ucb_delta_score(const ArmStats& stats, int K, double delta);
double moss_score(const ArmStats& stats, long long T, int K);
// Discounted statistics are pre-decayed by the caller to reflect time t.
double discounted_ucb_score(double disc_sum, double disc_n, double n_gamma_total,
                            double b, double xi);
double sliding_window_ucb_score(const ArmStats& stats, long long t, int tau,
                                double b, double xi);

double ts_beta_draw(Rng& rng, double S, double F);
// Bernoulli trial with success probability reward; reward must lie in [0, 1].
bool ts_bounded_trial(Rng& rng, double reward);
double ts_gaussian_draw(Rng& rng, long long N, double reward_sum, double a,
                        double b, double sigma);

class StochasticPolicy : public Policy {
 public:
  explicit StochasticPolicy(StochasticPolicyConfig cfg);

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  void update(const RoundLog& round) override;
  std::string name() const override;

  const ArmStats& stats(ArmId i) const { return stats_[static_cast<size_t>(i)]; }

 private:
  std::vector<ArmId> epsilon_greedy_select(int t, const std::vector<ArmId>& known);

  StochasticPolicyConfig cfg_;
  Rng rng_{0};
  int k_ = 1;
  std::vector<ArmStats> stats_;
  std::vector<double> ts_S_, ts_F_;  // Beta posterior counts
  bool warned_reward_bound_ = false;
};

}  // namespace banditstream
