#include "banditstream/policies_contextual.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace banditstream {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// RidgeState

RidgeState::RidgeState(int d, double lambda) : d_(d), lambda_(lambda) {
  if (d < 1 || !(lambda > 0.0))
    throw InvalidParameter("ridge state: d >= 1 and lambda > 0 required");
  V_ = lambda * Eigen::MatrixXd::Identity(d, d);
  b_ = Eigen::VectorXd::Zero(d);
}

void RidgeState::add(const Eigen::VectorXd& x, double reward, double weight) {
  if (x.size() != d_) throw DimensionMismatch("ridge state: context dimension mismatch");
  V_.noalias() += weight * x * x.transpose();
  b_.noalias() += weight * reward * x;
  llt_dirty_ = true;
}

void RidgeState::add_matrix(const Eigen::MatrixXd& m) {
  V_ += m;
  llt_dirty_ = true;
}

void RidgeState::add_vector(const Eigen::VectorXd& v) { b_ += v; }

const Eigen::LLT<Eigen::MatrixXd>& RidgeState::llt() const {
  if (llt_dirty_) {
    llt_.compute(V_);
    if (llt_.info() != Eigen::Success)
      throw NotPositiveDefinite("ridge state: V lost positive definiteness");
    llt_dirty_ = false;
  }
  return llt_;
}

Eigen::VectorXd RidgeState::beta_hat() const { return llt().solve(b_); }

double RidgeState::mahalanobis(const Eigen::VectorXd& x) const {
  if (x.size() != d_) throw DimensionMismatch("ridge state: context dimension mismatch");
  return std::sqrt(std::max(0.0, x.dot(llt().solve(x))));
}

double RidgeState::log_det_ratio() const {
  const auto& L = llt().matrixLLT();
  double logdet = 0.0;
  for (int i = 0; i < d_; ++i) logdet += 2.0 * std::log(L(i, i));
  return logdet - d_ * std::log(lambda_);
}

double linucb_score(const RidgeState& ridge, const Eigen::VectorXd& x, double alpha) {
  return x.dot(ridge.beta_hat()) + alpha * ridge.mahalanobis(x);
}

double oful_alpha(const RidgeState& ridge, double R, double S_bound, double delta) {
  return R * std::sqrt(2.0 * (0.5 * ridge.log_det_ratio() - std::log(delta))) +
         std::sqrt(ridge.lambda()) * S_bound;
}

Eigen::VectorXd contextual_ts_draw(Rng& rng, const RidgeState& ridge, double sigma) {
  if (!(sigma > 0.0)) throw InvalidParameter("contextual TS: sigma must be positive");
  // Covariance sigma^2 V^{-1}: draw beta_hat + sigma L^{-T} z with V = L L^T.
  Eigen::LLT<Eigen::MatrixXd> llt(ridge.V());
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("contextual TS: V not positive definite");
  Eigen::VectorXd z(ridge.dim());
  for (int i = 0; i < ridge.dim(); ++i) z[i] = rng.normal();
  Eigen::MatrixXd Lt = llt.matrixU();
  return ridge.beta_hat() + sigma * Lt.triangularView<Eigen::Upper>().solve(z);
}

// ---------------------------------------------------------------------------
// SampLinUCB

double samplin_rho(long long n_obs, long long t, double L, int d, double delta) {
  if (n_obs < 1 || t < 1) throw InvalidParameter("samplin_rho: n_obs and t must be >= 1");
  const double raw =
      L * d *
      std::sqrt(2.0 / static_cast<double>(n_obs) *
                std::log(2.0 * d * static_cast<double>(t) * static_cast<double>(t) / delta));
  return std::min(raw, 2.0 * L);
}

void samplin_observe(ProfileState& p, RidgeState& ridge, const Eigen::VectorXd& x,
                     double R, double L, double S) {
  if (p.n_obs > 0) {
    const double w = static_cast<double>(p.N_both) / p.R_weight;
    ridge.add_matrix(-w * p.x_hat * p.x_hat.transpose());
    ridge.add_vector(-(p.s_i / p.R_weight) * p.x_hat);
  } else {
    p.x_hat = Eigen::VectorXd::Zero(x.size());
  }
  p.n_obs += 1;
  p.x_hat += (x - p.x_hat) / static_cast<double>(p.n_obs);
  p.R_weight = std::sqrt(R * R + L * L * S * S / static_cast<double>(p.n_obs));
  const double w = static_cast<double>(p.N_both) / p.R_weight;
  ridge.add_matrix(w * p.x_hat * p.x_hat.transpose());
  ridge.add_vector((p.s_i / p.R_weight) * p.x_hat);
}

void samplin_select_update(ProfileState& p, RidgeState& ridge, double reward) {
  p.N_both += 1;
  p.s_i += reward;
  ridge.add(p.x_hat, reward, 1.0 / p.R_weight);
}

double samplin_score(const ProfileState& p, const RidgeState& ridge, double alpha_t,
                     double rho) {
  if (p.n_obs < 1) throw NeverObserved("samplin_score: arm has no profile sample");
  const Eigen::VectorXd beta = ridge.beta_hat();
  const double score = p.x_hat.dot(beta) + alpha_t * ridge.mahalanobis(p.x_hat) +
                       rho * (beta.norm() + alpha_t / std::sqrt(ridge.lambda()));
#ifndef NDEBUG
  if (beta.norm() > 1e-12 && ridge.mahalanobis(p.x_hat) > 1e-12) {
    const double eps_form = samplin_score_eps_form(p, ridge, alpha_t, rho);
    assert(std::abs(score - eps_form) <= 1e-9 * std::max(1.0, std::abs(score)));
  }
#endif
  return score;
}

double samplin_score_eps_form(const ProfileState& p, const RidgeState& ridge,
                              double alpha_t, double rho) {
  if (p.n_obs < 1) throw NeverObserved("samplin_score: arm has no profile sample");
  const Eigen::VectorXd beta = ridge.beta_hat();
  const Eigen::VectorXd eps_bar = rho * beta / beta.norm();
  const Eigen::VectorXd eps_tilde =
      rho * p.x_hat / (std::sqrt(ridge.lambda()) * ridge.mahalanobis(p.x_hat));
  return (p.x_hat + eps_bar).dot(beta) + alpha_t * ridge.mahalanobis(p.x_hat + eps_tilde);
}

// ---------------------------------------------------------------------------
// HiddenBiasState

HiddenBiasState::HiddenBiasState(int num_arms, int d) : d_(d) {
  V_ = Eigen::MatrixXd::Identity(d, d);
  b_ = Eigen::VectorXd::Zero(d);
  arms_.resize(static_cast<size_t>(num_arms));
  for (auto& a : arms_) {
    a.x_hat = Eigen::VectorXd::Zero(d);
    a.b_i = Eigen::VectorXd::Zero(d);
    a.x_bar = Eigen::VectorXd::Zero(d);
  }
}

void HiddenBiasState::observe(ArmId i, const Eigen::VectorXd& x) {
  ProfileState& a = arms_[static_cast<size_t>(i)];
  a.n_obs += 1;
  a.x_hat += (x - a.x_hat) / static_cast<double>(a.n_obs);
}

void HiddenBiasState::selected_observed(ArmId i, const Eigen::VectorXd& x, double reward) {
  ProfileState& a = arms_[static_cast<size_t>(i)];
  const double n1 = static_cast<double>(a.N_both) + 1.0;
  V_.noalias() += a.b_i * a.b_i.transpose() / n1;
  b_.noalias() += a.b_i * (a.s_i / n1);
  a.N_both += 1;
  a.s_i += reward;
  const double n2 = static_cast<double>(a.N_both) + 1.0;
  a.mu_bar = a.s_i / n2;
  a.b_i += x;
  a.x_bar = a.b_i / n2;
  V_.noalias() += x * x.transpose() - a.b_i * a.b_i.transpose() / n2;
  b_.noalias() += reward * x - a.b_i * (a.s_i / n2);
  llt_dirty_ = true;
}

const Eigen::LLT<Eigen::MatrixXd>& HiddenBiasState::llt() const {
  if (llt_dirty_) {
    llt_.compute(V_);
    if (llt_.info() != Eigen::Success)
      throw NotPositiveDefinite("hidden bias state: V lost positive definiteness");
    llt_dirty_ = false;
  }
  return llt_;
}

Eigen::VectorXd HiddenBiasState::beta_bar() const { return llt().solve(b_); }

double HiddenBiasState::mahalanobis(const Eigen::VectorXd& x) const {
  return std::sqrt(std::max(0.0, x.dot(llt().solve(x))));
}

double hidden_mean_score(const HiddenBiasState& state, ArmId i,
                         const std::optional<Eigen::VectorXd>& x, double alpha,
                         double alpha1, double alpha2) {
  const ProfileState& a = state.arm(i);
  const double n1 = static_cast<double>(a.N_both) + 1.0;
  const Eigen::VectorXd beta = state.beta_bar();
  if (x.has_value()) {
    const Eigen::VectorXd diff = *x - a.x_bar;
    return a.mu_bar + diff.dot(beta) +
           alpha * std::sqrt(1.0 / n1 + state.mahalanobis(diff) * state.mahalanobis(diff));
  }
  if (a.n_obs < 1)
    throw NeverObserved("hidden_mean_score: unobserved branch needs n_obs >= 1");
  const Eigen::VectorXd diff = a.x_hat - a.x_bar;
  const double m = state.mahalanobis(diff);
  return a.mu_bar + diff.dot(beta) + alpha1 * std::sqrt(1.0 / n1 + m * m) +
         alpha2 * std::sqrt(1.0 / static_cast<double>(a.n_obs));
}

// ---------------------------------------------------------------------------
// ActivityState and the sampling score

ActivityState::ActivityState(int num_arms, int M_, int steps)
    : M(M_), steps_per_period(steps) {
  if (M < 1 || steps < 1) throw InvalidParameter("activity state: M and steps must be >= 1");
  S.assign(static_cast<size_t>(num_arms), std::vector<double>(static_cast<size_t>(M), 0.0));
  F.assign(static_cast<size_t>(num_arms), std::vector<double>(static_cast<size_t>(M), 0.0));
}

int ActivityState::period_of(int t) const { return ((t - 1) / steps_per_period) % M; }

double ActivityState::activity_mean(ArmId i, int period) const {
  const double s = S[static_cast<size_t>(i)][static_cast<size_t>(period)];
  const double f = F[static_cast<size_t>(i)][static_cast<size_t>(period)];
  return (s + 1.0) / (s + f + 2.0);
}

double hidden_sample_score(Rng& rng, const HiddenBiasState& state, ArmId i,
                           const ActivityState& activity, int period,
                           long long n_act, const Eigen::VectorXd& x_act_mean,
                           double sigma0, double sigma_ctx, double alpha,
                           int L_samples) {
  const double p_active = activity.activity_mean(i, period);
  // Conjugate posterior predictive with spherical priors:
  //   mean  (S0^-1 + n S^-1)^-1 n S^-1 x_act,  cov  (S0^-1 + n S^-1)^-1 + S.
  const double prec0 = 1.0 / (sigma0 * sigma0);
  const double prec = 1.0 / (sigma_ctx * sigma_ctx);
  const double post_var = 1.0 / (prec0 + static_cast<double>(n_act) * prec);
  const double shrink = post_var * static_cast<double>(n_act) * prec;
  const double pred_sd = std::sqrt(post_var + sigma_ctx * sigma_ctx);
  const Eigen::VectorXd pred_mean = shrink * x_act_mean;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(state.dim());

  double total = 0.0;
  Eigen::VectorXd draw(state.dim());
  for (int s = 0; s < L_samples; ++s) {
    const bool is_active = rng.uniform() < p_active;
    if (is_active) {
      for (int j = 0; j < state.dim(); ++j) draw[j] = pred_mean[j] + pred_sd * rng.normal();
      total += hidden_mean_score(state, i, draw, alpha, 0.0, 0.0);
    } else {
      total += hidden_mean_score(state, i, zero, alpha, 0.0, 0.0);
    }
  }
  return total / static_cast<double>(L_samples);
}

// ---------------------------------------------------------------------------
// VariationalContextState

VariationalContextState::VariationalContextState(int num_arms, int d, double a0,
                                                 double b0, int window,
                                                 bool randomized_init)
    : d_(d), a0_(a0), b0_(b0), window_(window), randomized_init_(randomized_init) {
  if (d < 1 || !(a0 > 0.0) || !(b0 > 0.0) || window < 1)
    throw InvalidParameter("variational context state: invalid parameters");
  ga_V_ = Eigen::MatrixXd::Zero(d, d);
  ga_b_ = Eigen::VectorXd::Zero(d);
  V_ = Eigen::MatrixXd::Identity(d, d);
  beta_mean_ = Eigen::VectorXd::Zero(d);
  beta_cov_ = Eigen::MatrixXd::Identity(d, d);
  arms_.resize(static_cast<size_t>(num_arms));
  for (auto& a : arms_) {
    a.mu_mean = Eigen::VectorXd::Zero(d);
    a.mu_prec = a0 / b0;
    a.a_post = a0;
    a.b_post = b0;
    a.c_sum = Eigen::VectorXd::Zero(d);
    a.W_inv = Eigen::MatrixXd::Identity(d, d);
  }
}

void VariationalContextState::observe(ArmId i, const Eigen::VectorXd& x) {
  Arm& a = arms_[static_cast<size_t>(i)];
  a.c_sum += x;
  a.c_sq += x.squaredNorm();
  a.n_C += 1;
}

void VariationalContextState::add_selected_observed(const Eigen::VectorXd& x, double r) {
  ga_V_.noalias() += x * x.transpose();
  ga_b_.noalias() += r * x;
}

void VariationalContextState::add_selected_hidden(ArmId i, int t, double r, Rng* rng) {
  Arm& a = arms_[static_cast<size_t>(i)];
  Arm::Pending p;
  p.s = t;
  p.r = r;
  if (randomized_init_ && rng != nullptr) {
    p.x_mean.resize(d_);
    for (int j = 0; j < d_; ++j) p.x_mean[j] = rng->normal();
  } else {
    p.x_mean = a.n_C > 0 ? Eigen::VectorXd(a.c_sum / static_cast<double>(a.n_C))
                         : Eigen::VectorXd::Zero(d_);
  }
  a.pending.push_back(std::move(p));
}

void VariationalContextState::drop_old(int t) {
  for (auto& a : arms_)
    while (!a.pending.empty() && a.pending.front().s <= t - window_) a.pending.pop_front();
}

double VariationalContextState::sweep(int nbIt) {
  double last_delta = 0.0;
  for (int it = 0; it < nbIt; ++it) {
    double delta = 0.0;
    // beta block
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(d_, d_) + ga_V_;
    Eigen::VectorXd bb = ga_b_;
    for (const auto& a : arms_) {
      if (a.pending.empty()) continue;
      const double nb = static_cast<double>(a.pending.size());
      V.noalias() += nb * a.W_inv;
      for (const auto& p : a.pending) {
        V.noalias() += p.x_mean * p.x_mean.transpose();
        bb.noalias() += p.r * p.x_mean;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success)
      throw NonPsdCovariance("variational sweep: beta precision not PD");
    const Eigen::VectorXd beta_new = llt.solve(bb);
    delta = std::max(delta, (beta_new - beta_mean_).cwiseAbs().maxCoeff());
    beta_mean_ = beta_new;
    beta_cov_ = llt.solve(Eigen::MatrixXd::Identity(d_, d_));
    V_ = V;
    llt_dirty_ = true;
    const Eigen::MatrixXd E_bbT = beta_cov_ + beta_mean_ * beta_mean_.transpose();

    for (auto& a : arms_) {
      const double n = static_cast<double>(a.n());
      // mu update (previous E[tau])
      const double e_tau_prev = a.a_post / a.b_post;
      Eigen::VectorXd sum_x = a.c_sum;
      for (const auto& p : a.pending) sum_x += p.x_mean;
      const Eigen::VectorXd mu_new = sum_x / (1.0 + n);
      delta = std::max(delta, (mu_new - a.mu_mean).cwiseAbs().maxCoeff());
      a.mu_mean = mu_new;
      a.mu_prec = (1.0 + n) * e_tau_prev;
      // tau update
      const double e_mu_sq = d_ / a.mu_prec + a.mu_mean.squaredNorm();
      double sq = a.c_sq;
      for (const auto& p : a.pending) sq += a.W_inv.trace() + p.x_mean.squaredNorm();
      a.a_post = a0_ + d_ * (1.0 + n) / 2.0;
      a.b_post = b0_ + 0.5 * ((1.0 + n) * e_mu_sq - 2.0 * a.mu_mean.dot(sum_x) + sq);
      if (!(a.b_post > 0.0))
        throw NonPsdCovariance("variational sweep: gamma rate turned nonpositive");
      // pending latents
      if (!a.pending.empty()) {
        const double e_tau = a.a_post / a.b_post;
        Eigen::MatrixXd W = E_bbT + e_tau * Eigen::MatrixXd::Identity(d_, d_);
        Eigen::LLT<Eigen::MatrixXd> lltw(W);
        if (lltw.info() != Eigen::Success)
          throw NonPsdCovariance("variational sweep: latent precision not PD");
        a.W_inv = lltw.solve(Eigen::MatrixXd::Identity(d_, d_));
        const Eigen::VectorXd u = lltw.solve(beta_mean_);
        const Eigen::VectorXd v = lltw.solve((e_tau * a.mu_mean).eval());
        for (auto& p : a.pending) {
          const Eigen::VectorXd x_new = u * p.r + v;
          delta = std::max(delta, (x_new - p.x_mean).cwiseAbs().maxCoeff());
          p.x_mean = x_new;
        }
      }
    }
    last_delta = delta;
  }
  return last_delta;
}

double VariationalContextState::mahalanobis(const Eigen::VectorXd& x) const {
  if (llt_dirty_) {
    llt_.compute(V_);
    if (llt_.info() != Eigen::Success)
      throw NonPsdCovariance("variational state: V not positive definite");
    llt_dirty_ = false;
  }
  return std::sqrt(std::max(0.0, x.dot(llt_.solve(x))));
}

double hidden_vi_score(const VariationalContextState& state, ArmId i,
                       const std::optional<Eigen::VectorXd>& x, double alpha,
                       double alpha1, double alpha2) {
  if (x.has_value())
    return x->dot(state.beta_mean()) + alpha * state.mahalanobis(*x);
  const auto& a = state.arm(i);
  const double n = static_cast<double>(a.n());
  return a.mu_mean.dot(state.beta_mean()) + alpha1 * state.mahalanobis(a.mu_mean) +
         alpha2 * std::sqrt(a.b_post / (a.a_post * (1.0 + n)));
}

// ---------------------------------------------------------------------------
// LinearContextualPolicy

LinearContextualPolicy::LinearContextualPolicy(LinearPolicyConfig cfg) : cfg_(cfg) {
  if (!(cfg_.lambda > 0.0)) throw InvalidParameter("linear policy: lambda must be positive");
  if (!(cfg_.delta > 0.0 && cfg_.delta < 1.0))
    throw InvalidParameter("linear policy: delta must lie in (0, 1)");
}

void LinearContextualPolicy::reset(int num_arms, int k, Rng rng) {
  rng_ = rng;
  k_ = k;
  d_ = 0;
  ridge_.reset();
  pulls_.assign(static_cast<size_t>(num_arms), 0);
}

std::vector<ArmId> LinearContextualPolicy::select(int t, const std::vector<ArmId>& known,
                                                  const Observation& obs) {
  (void)t;
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("linear policy: fewer known arms than k");
  if (d_ == 0 && !obs.contexts.empty()) {
    d_ = static_cast<int>(obs.contexts.front().size());
    ridge_ = std::make_unique<RidgeState>(d_, cfg_.lambda);
  }
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  double alpha = cfg_.alpha;
  Eigen::VectorXd beta_draw;
  if (ridge_) {
    if (cfg_.kind == LinearPolicyKind::OFUL)
      alpha = oful_alpha(*ridge_, cfg_.R, cfg_.S_bound, cfg_.delta);
    else if (cfg_.kind == LinearPolicyKind::ContextualTS)
      beta_draw = contextual_ts_draw(rng_, *ridge_, cfg_.sigma);
  }
  std::vector<int> ctx_of(pulls_.size(), -1);
  for (size_t j = 0; j < obs.arms.size(); ++j)
    ctx_of[static_cast<size_t>(obs.arms[j])] = static_cast<int>(j);
  for (ArmId i : known) {
    double score;
    if (pulls_[static_cast<size_t>(i)] == 0) {
      score = kInf;
    } else if (ctx_of[static_cast<size_t>(i)] < 0 || !ridge_) {
      score = -kInf;
    } else {
      const Eigen::VectorXd& x = obs.contexts[static_cast<size_t>(ctx_of[static_cast<size_t>(i)])];
      if (cfg_.kind == LinearPolicyKind::ContextualTS)
        score = x.dot(beta_draw);
      else
        score = linucb_score(*ridge_, x, alpha);
    }
    scores.emplace_back(i, score);
  }
  return top_k(scores, k_);
}

void LinearContextualPolicy::update(const RoundLog& round) {
  check_round_order(round.t);
  std::vector<int> ctx_of(pulls_.size(), -1);
  for (size_t j = 0; j < round.observed.size(); ++j)
    ctx_of[static_cast<size_t>(round.observed[j])] = static_cast<int>(j);
  for (size_t j = 0; j < round.selected.size(); ++j) {
    const ArmId i = round.selected[j];
    pulls_[static_cast<size_t>(i)] += 1;
    const int c = ctx_of[static_cast<size_t>(i)];
    if (c >= 0 && ridge_) ridge_->add(round.contexts[static_cast<size_t>(c)], round.rewards[j]);
  }
}

std::string LinearContextualPolicy::name() const {
  switch (cfg_.kind) {
    case LinearPolicyKind::LinUCB: return "linucb";
    case LinearPolicyKind::OFUL: return "oful";
    case LinearPolicyKind::ContextualTS: return "contextual_ts";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// SampLinUcbPolicy

SampLinUcbPolicy::SampLinUcbPolicy(SampLinUcbConfig cfg) : cfg_(cfg) {
  if (!(cfg_.delta > 0.0 && cfg_.delta < 1.0))
    throw InvalidParameter("samplin ucb: delta must lie in (0, 1)");
  if (!(cfg_.R > 0.0) || !(cfg_.S_bound > 0.0) || !(cfg_.L_norm > 0.0))
    throw InvalidParameter("samplin ucb: R, S and L must be positive");
}

void SampLinUcbPolicy::reset(int num_arms, int k, Rng) {
  k_ = k;
  d_ = 0;
  lambda_ = cfg_.lambda > 0.0 ? cfg_.lambda
                              : std::max(1.0, 2.0 * cfg_.L_norm * cfg_.L_norm);
  ridge_.reset();
  profiles_.assign(static_cast<size_t>(num_arms), ProfileState{});
}

std::vector<ArmId> SampLinUcbPolicy::select(int t, const std::vector<ArmId>& known,
                                            const Observation& obs) {
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("samplin ucb: fewer known arms than k");
  if (d_ == 0 && !obs.contexts.empty()) {
    d_ = static_cast<int>(obs.contexts.front().size());
    ridge_ = std::make_unique<RidgeState>(d_, lambda_);
  }
  for (size_t j = 0; j < obs.arms.size(); ++j)
    samplin_observe(profiles_[static_cast<size_t>(obs.arms[j])], *ridge_,
                    obs.contexts[j], cfg_.R, cfg_.L_norm, cfg_.S_bound);

  double alpha_t = 0.0;
  if (ridge_)
    alpha_t = std::sqrt(2.0 * (0.5 * ridge_->log_det_ratio() - std::log(cfg_.delta))) +
              std::sqrt(lambda_) * cfg_.S_bound;
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  for (ArmId i : known) {
    const ProfileState& p = profiles_[static_cast<size_t>(i)];
    double score;
    if (p.N_both == 0)
      score = kInf;
    else if (p.n_obs == 0 || !ridge_)
      score = -kInf;  // no profile sample yet: cannot be scored
    else
      score = samplin_score(p, *ridge_, alpha_t,
                            samplin_rho(p.n_obs, t, cfg_.L_norm, d_, cfg_.delta));
    scores.emplace_back(i, score);
  }
  return top_k(scores, k_);
}

void SampLinUcbPolicy::update(const RoundLog& round) {
  check_round_order(round.t);
  for (size_t j = 0; j < round.selected.size(); ++j) {
    ProfileState& p = profiles_[static_cast<size_t>(round.selected[j])];
    if (p.n_obs == 0) {
      // Selected before any sample arrived (cold start); rewards still count.
      p.N_both += 1;
      p.s_i += round.rewards[j];
      continue;
    }
    samplin_select_update(p, *ridge_, round.rewards[j]);
  }
}

std::string SampLinUcbPolicy::name() const { return "samplin_ucb"; }

// ---------------------------------------------------------------------------
// HiddenLinUcbMeanPolicy

HiddenLinUcbMeanPolicy::HiddenLinUcbMeanPolicy(HiddenLinUcbConfig cfg) : cfg_(cfg) {
  // The first-model experiments set alpha = alpha1 = alpha2 (1.96 at delta 0.05).
  alpha_ = norm_inv_cdf(1.0 - cfg_.delta / 2.0);
  alpha1_ = alpha_;
  alpha2_ = alpha_;
}

void HiddenLinUcbMeanPolicy::reset(int num_arms, int k, Rng) {
  k_ = k;
  d_ = 0;
  state_.reset();
  pulls_.assign(static_cast<size_t>(num_arms), 0);
  round_ctx_.assign(static_cast<size_t>(num_arms), std::nullopt);
}

std::vector<ArmId> HiddenLinUcbMeanPolicy::select(int, const std::vector<ArmId>& known,
                                                  const Observation& obs) {
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("hidden linucb: fewer known arms than k");
  if (d_ == 0 && !obs.contexts.empty()) {
    d_ = static_cast<int>(obs.contexts.front().size());
    state_ = std::make_unique<HiddenBiasState>(static_cast<int>(pulls_.size()), d_);
  }
  std::fill(round_ctx_.begin(), round_ctx_.end(), std::nullopt);
  for (size_t j = 0; j < obs.arms.size(); ++j) {
    state_->observe(obs.arms[j], obs.contexts[j]);
    round_ctx_[static_cast<size_t>(obs.arms[j])] = obs.contexts[j];
  }
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  for (ArmId i : known) {
    double score;
    if (pulls_[static_cast<size_t>(i)] == 0)
      score = kInf;
    else if (!state_)
      score = -kInf;
    else if (round_ctx_[static_cast<size_t>(i)].has_value())
      score = hidden_mean_score(*state_, i, round_ctx_[static_cast<size_t>(i)], alpha_, 0, 0);
    else if (state_->arm(i).n_obs == 0)
      score = -kInf;
    else
      score = hidden_mean_score(*state_, i, std::nullopt, alpha_, alpha1_, alpha2_);
    scores.emplace_back(i, score);
  }
  return top_k(scores, k_);
}

void HiddenLinUcbMeanPolicy::update(const RoundLog& round) {
  check_round_order(round.t);
  std::vector<int> ctx_of(pulls_.size(), -1);
  for (size_t j = 0; j < round.observed.size(); ++j)
    ctx_of[static_cast<size_t>(round.observed[j])] = static_cast<int>(j);
  for (size_t j = 0; j < round.selected.size(); ++j) {
    const ArmId i = round.selected[j];
    pulls_[static_cast<size_t>(i)] += 1;
    const int c = ctx_of[static_cast<size_t>(i)];
    if (c >= 0 && state_)
      state_->selected_observed(i, round.contexts[static_cast<size_t>(c)], round.rewards[j]);
  }
}

std::string HiddenLinUcbMeanPolicy::name() const { return "hidden_linucb_mean"; }

// ---------------------------------------------------------------------------
// HiddenLinUcbSamplePolicy

HiddenLinUcbSamplePolicy::HiddenLinUcbSamplePolicy(HiddenLinUcbConfig cfg)
    : HiddenLinUcbMeanPolicy(cfg) {
  if (cfg_.L_samples < 1) throw InvalidParameter("hidden sample: L_samples must be >= 1");
}

void HiddenLinUcbSamplePolicy::reset(int num_arms, int k, Rng rng) {
  HiddenLinUcbMeanPolicy::reset(num_arms, k, rng);
  rng_ = rng;
  activity_ = ActivityState(num_arms, cfg_.M, cfg_.steps_per_period);
  n_act_.assign(static_cast<size_t>(num_arms), 0);
  x_act_sum_.clear();
}

std::vector<ArmId> HiddenLinUcbSamplePolicy::select(int t, const std::vector<ArmId>& known,
                                                    const Observation& obs) {
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("hidden linucb: fewer known arms than k");
  if (d_ == 0 && !obs.contexts.empty()) {
    d_ = static_cast<int>(obs.contexts.front().size());
    state_ = std::make_unique<HiddenBiasState>(static_cast<int>(pulls_.size()), d_);
  }
  if (x_act_sum_.empty() && d_ > 0)
    x_act_sum_.assign(pulls_.size(), Eigen::VectorXd::Zero(d_));
  const int period = activity_.period_of(t);
  std::fill(round_ctx_.begin(), round_ctx_.end(), std::nullopt);
  for (size_t j = 0; j < obs.arms.size(); ++j) {
    const ArmId i = obs.arms[j];
    const Eigen::VectorXd& x = obs.contexts[j];
    state_->observe(i, x);
    round_ctx_[static_cast<size_t>(i)] = x;
    if (x.cwiseAbs().maxCoeff() == 0.0) {
      activity_.F[static_cast<size_t>(i)][static_cast<size_t>(period)] += 1.0;
    } else {
      activity_.S[static_cast<size_t>(i)][static_cast<size_t>(period)] += 1.0;
      n_act_[static_cast<size_t>(i)] += 1;
      x_act_sum_[static_cast<size_t>(i)] += x;
    }
  }
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  for (ArmId i : known) {
    double score;
    if (pulls_[static_cast<size_t>(i)] == 0)
      score = kInf;
    else if (!state_)
      score = -kInf;
    else if (round_ctx_[static_cast<size_t>(i)].has_value())
      score = hidden_mean_score(*state_, i, round_ctx_[static_cast<size_t>(i)], alpha_, 0, 0);
    else {
      const long long na = n_act_[static_cast<size_t>(i)];
      const Eigen::VectorXd mean =
          na > 0 ? Eigen::VectorXd(x_act_sum_[static_cast<size_t>(i)] / static_cast<double>(na))
                 : Eigen::VectorXd::Zero(d_);
      score = hidden_sample_score(rng_, *state_, i, activity_, period, na, mean,
                                  cfg_.sigma0, cfg_.sigma_ctx, alpha_, cfg_.L_samples);
    }
    scores.emplace_back(i, score);
  }
  return top_k(scores, k_);
}

std::string HiddenLinUcbSamplePolicy::name() const { return "hidden_linucb_sample"; }

// ---------------------------------------------------------------------------
// HiddenLinUcbViPolicy

HiddenLinUcbViPolicy::HiddenLinUcbViPolicy(HiddenLinUcbConfig cfg) : cfg_(cfg) {
  alpha_ = norm_inv_cdf(1.0 - cfg_.delta / 2.0);
  alpha1_ = norm_inv_cdf(1.0 - cfg_.delta1 / 2.0);
  if (cfg_.nbIt < 1) throw InvalidParameter("hidden vi: nbIt must be >= 1");
}

void HiddenLinUcbViPolicy::reset(int num_arms, int k, Rng rng) {
  k_ = k;
  d_ = 0;
  rng_ = rng;
  state_.reset();
  pulls_.assign(static_cast<size_t>(num_arms), 0);
  round_ctx_.assign(static_cast<size_t>(num_arms), std::nullopt);
}

std::vector<ArmId> HiddenLinUcbViPolicy::select(int, const std::vector<ArmId>& known,
                                                const Observation& obs) {
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("hidden vi: fewer known arms than k");
  if (d_ == 0 && !obs.contexts.empty()) {
    d_ = static_cast<int>(obs.contexts.front().size());
    state_ = std::make_unique<VariationalContextState>(static_cast<int>(pulls_.size()), d_,
                                                       cfg_.a0, cfg_.b0, cfg_.window,
                                                       cfg_.randomized_init);
    alpha2_ = cfg_.S_bound * std::sqrt(chi2_inv_cdf(1.0 - cfg_.delta2, d_));
  }
  std::fill(round_ctx_.begin(), round_ctx_.end(), std::nullopt);
  for (size_t j = 0; j < obs.arms.size(); ++j) {
    state_->observe(obs.arms[j], obs.contexts[j]);
    round_ctx_[static_cast<size_t>(obs.arms[j])] = obs.contexts[j];
  }
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  for (ArmId i : known) {
    double score;
    if (pulls_[static_cast<size_t>(i)] == 0)
      score = kInf;
    else if (!state_)
      score = -kInf;
    else
      score = hidden_vi_score(*state_, i, round_ctx_[static_cast<size_t>(i)], alpha_,
                              alpha1_, alpha2_);
    scores.emplace_back(i, score);
  }
  return top_k(scores, k_);
}

void HiddenLinUcbViPolicy::update(const RoundLog& round) {
  check_round_order(round.t);
  if (!state_) return;
  std::vector<int> ctx_of(pulls_.size(), -1);
  for (size_t j = 0; j < round.observed.size(); ++j)
    ctx_of[static_cast<size_t>(round.observed[j])] = static_cast<int>(j);
  for (size_t j = 0; j < round.selected.size(); ++j) {
    const ArmId i = round.selected[j];
    pulls_[static_cast<size_t>(i)] += 1;
    const int c = ctx_of[static_cast<size_t>(i)];
    if (c >= 0)
      state_->add_selected_observed(round.contexts[static_cast<size_t>(c)], round.rewards[j]);
    else
      state_->add_selected_hidden(i, round.t, round.rewards[j],
                                  cfg_.randomized_init ? &rng_ : nullptr);
  }
  state_->drop_old(round.t);
  state_->sweep(cfg_.nbIt);
}

std::string HiddenLinUcbViPolicy::name() const { return "hidden_linucb_vi"; }

}  // namespace banditstream
