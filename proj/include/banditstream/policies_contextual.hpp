#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "banditstream/core.hpp"

namespace banditstream {

// Regularized regression state V = lambda I + sum of (weighted) outer
// products, b = sum of (weighted) reward-scaled contexts.
class RidgeState {
 public:
  RidgeState(int d, double lambda);

  int dim() const { return d_; }
  double lambda() const { return lambda_; }
  const Eigen::MatrixXd& V() const { return V_; }
  const Eigen::VectorXd& b() const { return b_; }

  void add(const Eigen::VectorXd& x, double reward, double weight = 1.0);
  void add_matrix(const Eigen::MatrixXd& m);   // V += m
  void add_vector(const Eigen::VectorXd& v);   // b += v

  Eigen::VectorXd beta_hat() const;
  // sqrt(x^T V^{-1} x)
  double mahalanobis(const Eigen::VectorXd& x) const;
  // log det(V) - d log(lambda)
  double log_det_ratio() const;

 private:
  const Eigen::LLT<Eigen::MatrixXd>& llt() const;

  int d_;
  double lambda_;
  Eigen::MatrixXd V_;
  Eigen::VectorXd b_;
  mutable Eigen::LLT<Eigen::MatrixXd> llt_;
  mutable bool llt_dirty_ = true;
};

double linucb_score(const RidgeState& ridge, const Eigen::VectorXd& x, double alpha);
double oful_alpha(const RidgeState& ridge, double R, double S_bound, double delta);
Eigen::VectorXd contextual_ts_draw(Rng& rng, const RidgeState& ridge, double sigma);

// Profile confidence radius min(L d sqrt((2/n) log(2 d t^2 / delta)), 2L).
double samplin_rho(long long n_obs, long long t, double L, int d, double delta);

// Per-arm state shared by the noisy-profile and bias-model policies.
struct ProfileState {
  long long n_obs = 0;          // profile samples seen
  Eigen::VectorXd x_hat;        // running mean of observed samples
  double R_weight = 0.0;        // sqrt(R^2 + L^2 S^2 / n_obs)
  long long N_both = 0;         // selections (with observed context, when hidden)
  double s_i = 0.0;             // reward sum over those rounds
  double mu_bar = 0.0;          // s_i / (N_both + 1)
  Eigen::VectorXd b_i;          // context sum over those rounds
  Eigen::VectorXd x_bar;        // b_i / (N_both + 1)
};

// Refreshes (n_obs, x_hat, R_weight) with a new sample and swaps the arm's
// aggregate contribution N x_hat x_hat^T / R (and S x_hat / R) inside the
// weighted regression; equivalent to a full rebuild.
void samplin_observe(ProfileState& p, RidgeState& ridge, const Eigen::VectorXd& x,
                     double R, double L, double S);
// Post-selection bookkeeping: N += 1, S += r, V += x_hat x_hat^T / R, b += r x_hat / R.
void samplin_select_update(ProfileState& p, RidgeState& ridge, double reward);
// Selection score in the decomposed form
//   x_hat^T beta + alpha ||x_hat||_{V^-1} + rho (||beta|| + alpha / sqrt(lambda)).
double samplin_score(const ProfileState& p, const RidgeState& ridge, double alpha_t,
                     double rho);
// Equivalent epsilon-vector form, kept for the structural identity checks.
double samplin_score_eps_form(const ProfileState& p, const RidgeState& ridge,
                              double alpha_t, double rho);

// Bias-centered posterior of the first hidden-context model: V and b absorb
// one pseudo-observation per arm, mu_bar/x_bar carry the +1 smoothing.
class HiddenBiasState {
 public:
  HiddenBiasState(int num_arms, int d);

  void observe(ArmId i, const Eigen::VectorXd& x);
  // Incremental update when an arm was selected with its context observed.
  void selected_observed(ArmId i, const Eigen::VectorXd& x, double reward);

  const Eigen::MatrixXd& V() const { return V_; }
  const Eigen::VectorXd& b() const { return b_; }
  Eigen::VectorXd beta_bar() const;
  double mahalanobis(const Eigen::VectorXd& x) const;
  const ProfileState& arm(ArmId i) const { return arms_[static_cast<size_t>(i)]; }
  int dim() const { return d_; }

 private:
  const Eigen::LLT<Eigen::MatrixXd>& llt() const;

  int d_;
  Eigen::MatrixXd V_;
  Eigen::VectorXd b_;
  std::vector<ProfileState> arms_;
  mutable Eigen::LLT<Eigen::MatrixXd> llt_;
  mutable bool llt_dirty_ = true;
};

// Score with the observed context (x given) or its empirical-mean substitute
// (x absent; adds the alpha2 / sqrt(n_obs) exploration term). Throws
// NeverObserved on the unobserved branch with n_obs = 0.
double hidden_mean_score(const HiddenBiasState& state, ArmId i,
                         const std::optional<Eigen::VectorXd>& x, double alpha,
                         double alpha1, double alpha2);

// Beta-Bernoulli per-period activity counts.
struct ActivityState {
  int M = 8;
  int steps_per_period = 10;
  std::vector<std::vector<double>> S, F;  // [arm][period]

  ActivityState() = default;
  ActivityState(int num_arms, int M, int steps_per_period);
  int period_of(int t) const;  // 0-based
  double activity_mean(ArmId i, int period) const;
};

// Monte-Carlo score over L samples of (activity, context) from the learned
// posterior predictive N(shrink * x_act, predictive_var I); inactive draws
// score at x = 0.
double hidden_sample_score(Rng& rng, const HiddenBiasState& state, ArmId i,
                           const ActivityState& activity, int period,
                           long long n_act, const Eigen::VectorXd& x_act_mean,
                           double sigma0, double sigma_ctx, double alpha,
                           int L_samples);

// Mean-field state for the variational hidden-context model.
class VariationalContextState {
 public:
  VariationalContextState(int num_arms, int d, double a0, double b0, int window,
                          bool randomized_init = false);

  void observe(ArmId i, const Eigen::VectorXd& x);                  // C set
  void add_selected_observed(const Eigen::VectorXd& x, double r);   // A set
  void add_selected_hidden(ArmId i, int t, double r, Rng* rng);     // B set
  void drop_old(int t);  // drop pending latents older than the window

  // Coordinate sweeps in the order beta -> per-arm (mu, tau, pending x).
  // Returns the max absolute parameter change of the last sweep.
  double sweep(int nbIt);

  const Eigen::MatrixXd& V() const { return V_; }
  Eigen::VectorXd beta_mean() const { return beta_mean_; }
  double mahalanobis(const Eigen::VectorXd& x) const;

  struct Arm {
    Eigen::VectorXd mu_mean;
    double mu_prec = 0.0;  // spherical precision (1 + n) E[tau]
    double a_post = 0.0, b_post = 0.0;
    Eigen::VectorXd c_sum;
    double c_sq = 0.0;
    long long n_C = 0;
    struct Pending {
      int s;
      double r;
      Eigen::VectorXd x_mean;
    };
    std::deque<Pending> pending;
    Eigen::MatrixXd W_inv;  // shared covariance of the pending latents
    long long n() const { return n_C + static_cast<long long>(pending.size()); }
  };
  const Arm& arm(ArmId i) const { return arms_[static_cast<size_t>(i)]; }
  int dim() const { return d_; }
  double a0() const { return a0_; }
  double b0() const { return b0_; }

 private:
  int d_;
  double a0_, b0_;
  int window_;
  bool randomized_init_;
  Eigen::MatrixXd ga_V_;  // sum over A of x x^T
  Eigen::VectorXd ga_b_;  // sum over A of r x
  Eigen::MatrixXd V_;
  Eigen::VectorXd beta_mean_;
  Eigen::MatrixXd beta_cov_;
  std::vector<Arm> arms_;
  mutable Eigen::LLT<Eigen::MatrixXd> llt_;
  mutable bool llt_dirty_ = true;

  friend class HiddenLinUcbViPolicy;
};

// Post-sweep scores: x^T beta + alpha ||x||_{V^-1} when observed, else
// mu^T beta + alpha1 ||mu||_{V^-1} + alpha2 sqrt(b / (a (1 + n))).
double hidden_vi_score(const VariationalContextState& state, ArmId i,
                       const std::optional<Eigen::VectorXd>& x, double alpha,
                       double alpha1, double alpha2);

// ---------------------------------------------------------------------------
// Policies

enum class LinearPolicyKind { LinUCB, OFUL, ContextualTS };

struct LinearPolicyConfig {
  LinearPolicyKind kind = LinearPolicyKind::LinUCB;
  double lambda = 1.0;
  double alpha = 1.0;    // LinUCB exploration scale
  double delta = 0.05;   // OFUL confidence
  double R = 1.0;        // sub-Gaussian constant
  double S_bound = 1.0;  // bound on ||beta||
  double sigma = 1.0;    // TS likelihood sd
};

class LinearContextualPolicy : public Policy {
 public:
  explicit LinearContextualPolicy(LinearPolicyConfig cfg);

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  void update(const RoundLog& round) override;
  std::string name() const override;

 private:
  LinearPolicyConfig cfg_;
  Rng rng_{0};
  int k_ = 1, d_ = 0;
  std::unique_ptr<RidgeState> ridge_;
  std::vector<long long> pulls_;
};

struct SampLinUcbConfig {
  double lambda = 0.0;  // 0 = max(1, 2 L^2)
  double R = 1.0;
  double S_bound = 1.0;
  double L_norm = 1.0;
  double delta = 0.05;
};

class SampLinUcbPolicy : public Policy {
 public:
  explicit SampLinUcbPolicy(SampLinUcbConfig cfg);

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  void update(const RoundLog& round) override;
  std::string name() const override;

  const RidgeState& ridge() const { return *ridge_; }
  const ProfileState& profile(ArmId i) const { return profiles_[static_cast<size_t>(i)]; }

 private:
  SampLinUcbConfig cfg_;
  double lambda_ = 1.0;
  int k_ = 1, d_ = 0;
  std::unique_ptr<RidgeState> ridge_;
  std::vector<ProfileState> profiles_;
};

struct HiddenLinUcbConfig {
  double delta = 0.05;    // observed-context confidence (alpha)
  double delta1 = 0.025;  // unobserved mean term
  double delta2 = 0.025;  // unobserved context-uncertainty term
  double S_bound = 1.0;
  // Sample variant
  int L_samples = 50;
  int M = 8;
  int steps_per_period = 10;
  double sigma0 = 1.0;
  double sigma_ctx = 1.0;
  // VI variant
  double a0 = 1.0, b0 = 1.0;
  int window = 100;
  int nbIt = 10;
  bool randomized_init = false;
};

class HiddenLinUcbMeanPolicy : public Policy {
 public:
  explicit HiddenLinUcbMeanPolicy(HiddenLinUcbConfig cfg);

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  void update(const RoundLog& round) override;
  std::string name() const override;

  const HiddenBiasState& state() const { return *state_; }

 protected:
  HiddenLinUcbConfig cfg_;
  double alpha_ = 0.0, alpha1_ = 0.0, alpha2_ = 0.0;
  int k_ = 1, d_ = 0;
  std::unique_ptr<HiddenBiasState> state_;
  std::vector<long long> pulls_;
  std::vector<std::optional<Eigen::VectorXd>> round_ctx_;
};

class HiddenLinUcbSamplePolicy : public HiddenLinUcbMeanPolicy {
 public:
  explicit HiddenLinUcbSamplePolicy(HiddenLinUcbConfig cfg);

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  std::string name() const override;

 private:
  Rng rng_{0};
  ActivityState activity_;
  std::vector<long long> n_act_;
  std::vector<Eigen::VectorXd> x_act_sum_;
};

class HiddenLinUcbViPolicy : public Policy {
 public:
  explicit HiddenLinUcbViPolicy(HiddenLinUcbConfig cfg);

  void reset(int num_arms, int k, Rng rng) override;
  std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                            const Observation& obs) override;
  void update(const RoundLog& round) override;
  std::string name() const override;

  const VariationalContextState& state() const { return *state_; }

 private:
  HiddenLinUcbConfig cfg_;
  double alpha_ = 0.0, alpha1_ = 0.0;
  int k_ = 1, d_ = 0;
  Rng rng_{0};
  std::unique_ptr<VariationalContextState> state_;
  std::vector<long long> pulls_;
  std::vector<std::optional<Eigen::VectorXd>> round_ctx_;
  double alpha2_ = 0.0;  // S sqrt(Psi^{-1}(1 - delta2)), set once d is known
};

}  // namespace banditstream
