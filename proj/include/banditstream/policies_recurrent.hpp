#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "banditstream/core.hpp"

namespace banditstream {

// Mean-field posterior for the VAR(1) reward model r_{i,t} = theta_i^T (R_{t-1}, 1).
// Missing rewards are latent Gaussians; the window bounds the set of latents
// that keep being re-estimated, older rounds are folded into frozen prefix sums.
class RelationalState {
 public:
  RelationalState(int K, double sigma, double alpha_prior, Eigen::VectorXd mu_prior,
                  int window);

  void add_round(int t, const std::vector<ArmId>& selected,
                 const std::vector<double>& rewards, Rng* init_rng = nullptr);
  // Coordinate sweeps (theta block first, then per-arm latents); returns the
  // max absolute parameter change of the last sweep.
  double sweep(int nbIt);

  int rounds_recorded() const { return t_max_; }
  // E[theta_i] as row i; shared covariance A^{-1}.
  const Eigen::MatrixXd& theta_mean() const { return theta_mean_; }
  const Eigen::MatrixXd& theta_cov() const { return theta_cov_; }
  // Expected reward vector of round s with the bias coordinate appended.
  Eigen::VectorXd expected_r_with_bias(int s) const;
  double latent_mean(ArmId i, int s) const;
  double latent_var(ArmId i, int s) const;
  bool observed(ArmId i, int s) const;
  double sigma() const { return sigma_; }
  const Eigen::VectorXd& mu_prior() const { return mu_prior_; }

 private:
  struct Round {
    int t = 0;
    std::vector<char> selected;
    Eigen::VectorXd r_mean;  // observed value or latent mean
    Eigen::VectorXd r_var;   // 0 when observed
  };
  const Round& round(int s) const;
  Round& round(int s);
  void fold_oldest();

  int K_;
  double sigma_, alpha_prior_;
  Eigen::VectorXd mu_prior_;
  int window_;
  int t_max_ = 0;
  std::deque<Round> rounds_;        // retained rounds, oldest may be frozen
  Eigen::MatrixXd prefix_A_;        // sum of E[(R_s,1)(R_s,1)^T] over folded rounds
  Eigen::MatrixXd prefix_B_;        // (K+1) x K, col i = folded design-target products
  Eigen::MatrixXd theta_mean_;      // K x (K+1)
  Eigen::MatrixXd theta_cov_;       // shared (K+1) x (K+1)
  std::vector<double> obs_sum_;     // running observed reward sums (latent init)
  std::vector<long long> obs_n_;
};

struct RrtsConfig {
  double sigma = 1.0;
  double alpha_prior = 1.0;
  double mu_prior = 0.0;  // scalar broadcast
  int window = 200;
  int nbIt = 10;
  bool randomized_init = false;
};

class RecurrentRelationalTsPolicy : public Policy {
 public:
  explicit RecurrentRelationalTsPolicy(RrtsConfig cfg);

  RrtsConfig config() const { return cfg_; }

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  void update(const RoundLog& round) override;
  std::string name() const override;

  const RelationalState& state() const { return *state_; }

 private:
  RrtsConfig cfg_;
  Rng rng_{0};
  int k_ = 1, K_ = 0;
  std::unique_ptr<RelationalState> state_;
  std::vector<long long> pulls_;
};

// Mean-field posterior for the latent-state model h_t = Theta h_{t-1} + noise,
// r_{i,t} = W_i^T h_t + b_i + noise. Out-of-window rounds are dropped; with
// memory enabled their contribution is carried as the parameter prior.
class LatentState {
 public:
  // init_rng, when given, draws the parameter-posterior means from their
  // priors. The deterministic zero start is an exact saddle of the coupled
  // updates (h = 0 keeps W at its intercept, W = 0 keeps h at 0), so the
  // sampler needs the symmetry broken at construction.
  LatentState(int K, int d, double sigma, double delta_lds, double alpha_prior,
              double gamma_prior, int window, bool mem_theta, bool mem_wb,
              Rng* init_rng = nullptr);

  void add_round(int t, const std::vector<ArmId>& selected,
                 const std::vector<double>& rewards);
  double sweep(int nbIt);
  double sweep_once(bool update_h, bool update_theta, bool update_wb);

  int rounds_recorded() const { return t_max_; }
  const Eigen::MatrixXd& theta_mean() const { return theta_mean_; }   // d x d, row j
  const Eigen::MatrixXd& theta_cov() const { return theta_cov_; }     // shared d x d
  const Eigen::VectorXd& wb_mean(ArmId i) const { return wb_mean_[static_cast<size_t>(i)]; }
  const Eigen::MatrixXd& wb_cov(ArmId i) const { return wb_cov_[static_cast<size_t>(i)]; }
  const Eigen::VectorXd& h_mean(int s) const;
  const Eigen::MatrixXd& h_cov(int s) const;
  // Test hook: pins q(h_s) to a point mass.
  void clamp_h(int s, const Eigen::VectorXd& value);

  double sigma() const { return sigma_; }
  double delta_lds() const { return delta_; }
  double gamma_prior() const { return gamma_prior_; }
  int dim() const { return d_; }

 private:
  struct Round {
    int t = 0;
    std::vector<ArmId> selected;
    std::vector<double> rewards;
    Eigen::VectorXd h_mean;
    Eigen::MatrixXd h_cov;
  };
  const Round& round(int s) const;
  Round& round(int s);
  void drop_oldest();

  int K_, d_;
  double sigma_, delta_, alpha_prior_, gamma_prior_;
  int window_;
  bool mem_theta_, mem_wb_;
  int t_max_ = 0;
  std::deque<Round> rounds_;
  Eigen::MatrixXd theta_A_mem_;                // carried precision for Theta rows
  Eigen::MatrixXd theta_B_mem_;                // carried d x d, col j for row j
  std::vector<Eigen::MatrixXd> wb_V_mem_;      // carried per-arm precision
  std::vector<Eigen::VectorXd> wb_v_mem_;
  Eigen::MatrixXd theta_mean_, theta_cov_;
  std::vector<Eigen::VectorXd> wb_mean_;
  std::vector<Eigen::MatrixXd> wb_cov_;
};

struct RstsConfig {
  int d = 4;
  double sigma = 1.0;
  double delta_lds = 1.0;
  double alpha_prior = 1.0;
  double gamma_prior = 1.0;
  int window = 100;
  int nbIt = 10;
  bool mem_theta = true;
  bool mem_wb = true;
};

class RecurrentStateTsPolicy : public Policy {
 public:
  explicit RecurrentStateTsPolicy(RstsConfig cfg);

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  void update(const RoundLog& round) override;
  std::string name() const override;

  const LatentState& state() const { return *state_; }

 private:
  RstsConfig cfg_;
  Rng rng_{0};
  int k_ = 1, K_ = 0;
  std::unique_ptr<LatentState> state_;
  std::vector<long long> pulls_;
};

// Linear-Gaussian Thompson sampling that treats the full previous-round reward
// vector as the context; usable only when the environment reveals every
// reward (an informational upper baseline for the recurrent experiments).
class RevealedRewardTsPolicy : public Policy {
 public:
  explicit RevealedRewardTsPolicy(double sigma = 1.0);

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  void update(const RoundLog& round) override;
  std::string name() const override;
  bool wants_full_rewards() const override { return true; }

 private:
  double sigma_;
  Rng rng_{0};
  int k_ = 1, K_ = 0;
  Eigen::MatrixXd V_;
  Eigen::MatrixXd B_;  // (K+1) x K, col i = b_i
  Eigen::VectorXd prev_rewards_;
  bool have_prev_ = false;
  std::vector<long long> pulls_;
};

}  // namespace banditstream
