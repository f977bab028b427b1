#include "banditstream/policies_recurrent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace banditstream {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NonPsdCovariance(what);
  return llt;
}

}  // namespace

// ---------------------------------------------------------------------------
// RelationalState

RelationalState::RelationalState(int K, double sigma, double alpha_prior,
                                 Eigen::VectorXd mu_prior, int window)
    : K_(K), sigma_(sigma), alpha_prior_(alpha_prior), mu_prior_(std::move(mu_prior)),
      window_(window) {
  if (K < 1 || !(sigma > 0.0) || !(alpha_prior > 0.0) || window < 1)
    throw InvalidParameter("relational state: invalid parameters");
  if (mu_prior_.size() != K)
    throw DimensionMismatch("relational state: mu_prior must have K entries");
  prefix_A_ = Eigen::MatrixXd::Zero(K + 1, K + 1);
  prefix_B_ = Eigen::MatrixXd::Zero(K + 1, K);
  theta_mean_ = Eigen::MatrixXd::Zero(K, K + 1);
  theta_cov_ =
      alpha_prior * alpha_prior * Eigen::MatrixXd::Identity(K + 1, K + 1);
  obs_sum_.assign(static_cast<size_t>(K), 0.0);
  obs_n_.assign(static_cast<size_t>(K), 0);
}

const RelationalState::Round& RelationalState::round(int s) const {
  return rounds_[static_cast<size_t>(s - rounds_.front().t)];
}

RelationalState::Round& RelationalState::round(int s) {
  return rounds_[static_cast<size_t>(s - rounds_.front().t)];
}

void RelationalState::add_round(int t, const std::vector<ArmId>& selected,
                                const std::vector<double>& rewards, Rng* init_rng) {
  if (t != t_max_ + 1) throw OutOfOrderRound("relational state: rounds must be consecutive");
  t_max_ = t;
  Round r;
  r.t = t;
  r.selected.assign(static_cast<size_t>(K_), 0);
  r.r_mean.resize(K_);
  r.r_var.resize(K_);
  for (int i = 0; i < K_; ++i) {
    const long long n = obs_n_[static_cast<size_t>(i)];
    double init = n > 0 ? obs_sum_[static_cast<size_t>(i)] / static_cast<double>(n) : 0.0;
    if (init_rng != nullptr) init += init_rng->normal(0.0, sigma_);
    r.r_mean[i] = init;
    r.r_var[i] = sigma_ * sigma_;
  }
  for (size_t j = 0; j < selected.size(); ++j) {
    const ArmId i = selected[j];
    r.selected[static_cast<size_t>(i)] = 1;
    r.r_mean[i] = rewards[j];
    r.r_var[i] = 0.0;
    obs_sum_[static_cast<size_t>(i)] += rewards[j];
    obs_n_[static_cast<size_t>(i)] += 1;
  }
  rounds_.push_back(std::move(r));
  // Keep rounds from t - window - 1 on (the first retained round is frozen
  // and only serves as a design row / backward reference).
  while (rounds_.front().t < t_max_ - window_ - 1) fold_oldest();
}

void RelationalState::fold_oldest() {
  const Round& u = rounds_.front();
  const Round& next = rounds_[1];
  Eigen::VectorXd z(K_ + 1);
  z.head(K_) = u.r_mean;
  z[K_] = 1.0;
  prefix_A_.noalias() += z * z.transpose();
  for (int i = 0; i < K_; ++i) prefix_A_(i, i) += u.r_var[i];
  prefix_B_.noalias() += z * next.r_mean.transpose();
  rounds_.pop_front();
}

Eigen::VectorXd RelationalState::expected_r_with_bias(int s) const {
  const Round& r = round(s);
  Eigen::VectorXd z(K_ + 1);
  z.head(K_) = r.r_mean;
  z[K_] = 1.0;
  return z;
}

double RelationalState::latent_mean(ArmId i, int s) const { return round(s).r_mean[i]; }
double RelationalState::latent_var(ArmId i, int s) const { return round(s).r_var[i]; }
bool RelationalState::observed(ArmId i, int s) const {
  return round(s).selected[static_cast<size_t>(i)] != 0;
}

double RelationalState::sweep(int nbIt) {
  if (t_max_ < 1) return 0.0;
  const double sig2 = sigma_ * sigma_;
  const int lo = rounds_.front().t;
  const int update_lo = std::max(1, t_max_ - window_ + 1);
  double last_delta = 0.0;
  for (int it = 0; it < nbIt; ++it) {
    double delta = 0.0;
    // theta block: shared precision A, per-arm linear terms.
    Eigen::MatrixXd A = prefix_A_;
    Eigen::MatrixXd B = prefix_B_;
    for (int s = lo; s <= t_max_ - 1; ++s) {
      const Round& r = round(s);
      Eigen::VectorXd z(K_ + 1);
      z.head(K_) = r.r_mean;
      z[K_] = 1.0;
      A.noalias() += z * z.transpose();
      for (int i = 0; i < K_; ++i) A(i, i) += r.r_var[i];
      B.noalias() += z * round(s + 1).r_mean.transpose();
    }
    A /= sig2;
    B /= sig2;
    A += Eigen::MatrixXd::Identity(K_ + 1, K_ + 1) / (alpha_prior_ * alpha_prior_);
    auto llt = checked_llt(A, "relational sweep: theta precision not PD");
    const Eigen::MatrixXd thetaT = llt.solve(B);  // (K+1) x K, col i = E[theta_i]
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(K_ + 1, K_ + 1));
    delta = std::max(delta, (thetaT.transpose() - theta_mean_).cwiseAbs().maxCoeff());
    theta_mean_ = thetaT.transpose();
    theta_cov_ = cov;
    // G(i,j) = E[beta_i^T beta_j] over the K+1 columns of Theta.
    const Eigen::MatrixXd G =
        thetaT * thetaT.transpose() + static_cast<double>(K_) * cov;

    // latent block, per arm then per round ascending.
    for (int i = 0; i < K_; ++i) {
      const auto theta_i = theta_mean_.row(i);
      for (int s = update_lo; s <= t_max_; ++s) {
        Round& r = round(s);
        if (r.selected[static_cast<size_t>(i)]) continue;
        const double backward =
            s >= 2 ? theta_i.head(K_).dot(round(s - 1).r_mean) + theta_i[K_]
                   : mu_prior_[i];
        double mean, var;
        if (s == t_max_) {
          mean = backward;
          var = sig2;
        } else {
          const double cross =
              G.row(i).head(K_).dot(r.r_mean) + G(i, K_) - G(i, i) * r.r_mean[i];
          const double forward = thetaT.row(i).dot(round(s + 1).r_mean);
          const double denom = 1.0 + G(i, i);
          mean = (forward + backward - cross) / denom;
          var = sig2 / denom;
        }
        delta = std::max(delta, std::abs(mean - r.r_mean[i]));
        r.r_mean[i] = mean;
        r.r_var[i] = var;
      }
    }
    last_delta = delta;
  }
  return last_delta;
}

// ---------------------------------------------------------------------------
// RecurrentRelationalTsPolicy

RecurrentRelationalTsPolicy::RecurrentRelationalTsPolicy(RrtsConfig cfg) : cfg_(cfg) {
  if (cfg_.nbIt < 1 || cfg_.window < 1)
    throw InvalidParameter("recurrent relational TS: nbIt and window must be >= 1");
}

void RecurrentRelationalTsPolicy::reset(int num_arms, int k, Rng rng) {
  rng_ = rng;
  k_ = k;
  K_ = num_arms;
  state_ = std::make_unique<RelationalState>(
      num_arms, cfg_.sigma, cfg_.alpha_prior,
      Eigen::VectorXd::Constant(num_arms, cfg_.mu_prior), cfg_.window);
  pulls_.assign(static_cast<size_t>(num_arms), 0);
}

std::vector<ArmId> RecurrentRelationalTsPolicy::select(int t,
                                                       const std::vector<ArmId>& known,
                                                       const Observation&) {
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("recurrent relational TS: fewer known arms than k");
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  if (t == 1) {
    for (ArmId i : known)
      scores.emplace_back(i, pulls_[static_cast<size_t>(i)] == 0
                                 ? kInf
                                 : rng_.normal(cfg_.mu_prior, cfg_.sigma));
    return top_k(scores, k_);
  }
  state_->sweep(cfg_.nbIt);
  const Eigen::MatrixXd L = chol(state_->theta_cov());
  Eigen::VectorXd r_draw(K_ + 1);
  for (int i = 0; i < K_; ++i) {
    if (state_->observed(i, t - 1))
      r_draw[i] = state_->latent_mean(i, t - 1);
    else
      r_draw[i] = rng_.normal(state_->latent_mean(i, t - 1),
                              std::sqrt(state_->latent_var(i, t - 1)));
  }
  r_draw[K_] = 1.0;
  Eigen::VectorXd z(K_ + 1);
  for (ArmId i : known) {
    if (pulls_[static_cast<size_t>(i)] == 0) {
      scores.emplace_back(i, kInf);
      continue;
    }
    for (int j = 0; j <= K_; ++j) z[j] = rng_.normal();
    const Eigen::VectorXd theta_draw = state_->theta_mean().row(i).transpose() + L * z;
    scores.emplace_back(i, theta_draw.dot(r_draw));
  }
  return top_k(scores, k_);
}

void RecurrentRelationalTsPolicy::update(const RoundLog& round) {
  check_round_order(round.t);
  for (ArmId i : round.selected) pulls_[static_cast<size_t>(i)] += 1;
  state_->add_round(round.t, round.selected, round.rewards,
                    cfg_.randomized_init ? &rng_ : nullptr);
}

std::string RecurrentRelationalTsPolicy::name() const { return "recurrent_relational_ts"; }

// ---------------------------------------------------------------------------
// LatentState

LatentState::LatentState(int K, int d, double sigma, double delta_lds,
                         double alpha_prior, double gamma_prior, int window,
                         bool mem_theta, bool mem_wb, Rng* init_rng)
    : K_(K), d_(d), sigma_(sigma), delta_(delta_lds), alpha_prior_(alpha_prior),
      gamma_prior_(gamma_prior), window_(window), mem_theta_(mem_theta),
      mem_wb_(mem_wb) {
  if (K < 1 || d < 1 || !(sigma > 0.0) || !(delta_lds > 0.0) || !(alpha_prior > 0.0) ||
      !(gamma_prior > 0.0) || window < 1)
    throw InvalidParameter("latent state: invalid parameters");
  theta_A_mem_ = Eigen::MatrixXd::Identity(d, d) / (alpha_prior * alpha_prior);
  theta_B_mem_ = Eigen::MatrixXd::Zero(d, d);
  wb_V_mem_.assign(static_cast<size_t>(K),
                   Eigen::MatrixXd::Identity(d + 1, d + 1) / (gamma_prior * gamma_prior));
  wb_v_mem_.assign(static_cast<size_t>(K), Eigen::VectorXd::Zero(d + 1));
  theta_mean_ = Eigen::MatrixXd::Zero(d, d);
  theta_cov_ = alpha_prior * alpha_prior * Eigen::MatrixXd::Identity(d, d);
  wb_mean_.assign(static_cast<size_t>(K), Eigen::VectorXd::Zero(d + 1));
  wb_cov_.assign(static_cast<size_t>(K),
                 gamma_prior * gamma_prior * Eigen::MatrixXd::Identity(d + 1, d + 1));
  if (init_rng != nullptr) {
    // Random rotation: keeps the initial latent dynamics marginally stable
    // instead of contractive, which is where the periodic fixed points live.
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = init_rng->normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j)
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    theta_mean_ = q;
    for (auto& wb : wb_mean_)
      for (int j = 0; j <= d; ++j) wb[j] = init_rng->normal(0.0, gamma_prior);
  }
}

const LatentState::Round& LatentState::round(int s) const {
  return rounds_[static_cast<size_t>(s - rounds_.front().t)];
}

LatentState::Round& LatentState::round(int s) {
  return rounds_[static_cast<size_t>(s - rounds_.front().t)];
}

const Eigen::VectorXd& LatentState::h_mean(int s) const { return round(s).h_mean; }
const Eigen::MatrixXd& LatentState::h_cov(int s) const { return round(s).h_cov; }

void LatentState::clamp_h(int s, const Eigen::VectorXd& value) {
  Round& r = round(s);
  r.h_mean = value;
  r.h_cov = Eigen::MatrixXd::Zero(d_, d_);
}

void LatentState::add_round(int t, const std::vector<ArmId>& selected,
                            const std::vector<double>& rewards) {
  if (t != t_max_ + 1) throw OutOfOrderRound("latent state: rounds must be consecutive");
  t_max_ = t;
  Round r;
  r.t = t;
  r.selected = selected;
  r.rewards = rewards;
  r.h_mean = Eigen::VectorXd::Zero(d_);
  r.h_cov = delta_ * delta_ * Eigen::MatrixXd::Identity(d_, d_);
  rounds_.push_back(std::move(r));
  while (rounds_.front().t <= t_max_ - window_) drop_oldest();
}

void LatentState::drop_oldest() {
  const Round& u = rounds_.front();
  const double sig2 = sigma_ * sigma_;
  const double del2 = delta_ * delta_;
  if (mem_theta_ && rounds_.size() >= 2) {
    const Round& next = rounds_[1];
    theta_A_mem_.noalias() += (u.h_mean * u.h_mean.transpose() + u.h_cov) / del2;
    theta_B_mem_.noalias() += u.h_mean * next.h_mean.transpose() / del2;
  }
  if (mem_wb_) {
    Eigen::VectorXd z(d_ + 1);
    z.head(d_) = u.h_mean;
    z[d_] = 1.0;
    Eigen::MatrixXd zz = z * z.transpose();
    zz.topLeftCorner(d_, d_) += u.h_cov;
    for (size_t j = 0; j < u.selected.size(); ++j) {
      const auto arm = static_cast<size_t>(u.selected[j]);
      wb_V_mem_[arm].noalias() += zz / sig2;
      wb_v_mem_[arm].noalias() += z * (u.rewards[j] / sig2);
    }
  }
  rounds_.pop_front();
}

double LatentState::sweep(int nbIt) {
  double last = 0.0;
  for (int it = 0; it < nbIt; ++it) last = sweep_once(true, true, true);
  return last;
}

double LatentState::sweep_once(bool update_h, bool update_theta, bool update_wb) {
  if (rounds_.empty()) return 0.0;
  const double sig2 = sigma_ * sigma_;
  const double del2 = delta_ * delta_;
  const int lo = rounds_.front().t;
  double delta_max = 0.0;

  if (update_h) {
    // E[Theta^T Theta] over rows: fixed during the h block.
    const Eigen::MatrixXd thetaT = theta_mean_.transpose();  // col j = row j of Theta
    const Eigen::MatrixXd E_TT =
        thetaT * thetaT.transpose() + static_cast<double>(d_) * theta_cov_;
    for (int s = lo; s <= t_max_; ++s) {
      Round& r = round(s);
      Eigen::MatrixXd F = Eigen::MatrixXd::Identity(d_, d_) / del2;
      if (s <= t_max_ - 1) F += E_TT / del2;
      Eigen::VectorXd g = Eigen::VectorXd::Zero(d_);
      for (size_t j = 0; j < r.selected.size(); ++j) {
        const auto arm = static_cast<size_t>(r.selected[j]);
        const Eigen::VectorXd& wb = wb_mean_[arm];
        const Eigen::MatrixXd& cov = wb_cov_[arm];
        const Eigen::VectorXd w = wb.head(d_);
        F.noalias() += (w * w.transpose() + cov.topLeftCorner(d_, d_)) / sig2;
        // E[W_i] r - (E[W_i] E[b_i] + Cov(W_i, b_i))
        g.noalias() +=
            (w * r.rewards[j] - (w * wb[d_] + cov.col(d_).head(d_))) / sig2;
      }
      if (s > lo) g.noalias() += theta_mean_ * round(s - 1).h_mean / del2;
      if (s <= t_max_ - 1) g.noalias() += theta_mean_.transpose() * round(s + 1).h_mean / del2;
      auto llt = checked_llt(F, "latent sweep: state precision not PD");
      const Eigen::VectorXd mean = llt.solve(g);
      delta_max = std::max(delta_max, (mean - r.h_mean).cwiseAbs().maxCoeff());
      r.h_mean = mean;
      r.h_cov = llt.solve(Eigen::MatrixXd::Identity(d_, d_));
    }
  }

  if (update_theta) {
    Eigen::MatrixXd A = theta_A_mem_;
    Eigen::MatrixXd B = theta_B_mem_;
    if (!mem_theta_) {
      A = Eigen::MatrixXd::Identity(d_, d_) / (alpha_prior_ * alpha_prior_);
      B.setZero();
    }
    for (int s = lo; s <= t_max_ - 1; ++s) {
      const Round& r = round(s);
      A.noalias() += (r.h_mean * r.h_mean.transpose() + r.h_cov) / del2;
      B.noalias() += r.h_mean * round(s + 1).h_mean.transpose() / del2;
    }
    auto llt = checked_llt(A, "latent sweep: theta precision not PD");
    const Eigen::MatrixXd thetaT = llt.solve(B);  // col j = E[theta_j]
    delta_max = std::max(delta_max, (thetaT.transpose() - theta_mean_).cwiseAbs().maxCoeff());
    theta_mean_ = thetaT.transpose();
    theta_cov_ = llt.solve(Eigen::MatrixXd::Identity(d_, d_));
  }

  if (update_wb) {
    std::vector<Eigen::MatrixXd> V(static_cast<size_t>(K_));
    std::vector<Eigen::VectorXd> v(static_cast<size_t>(K_));
    for (int i = 0; i < K_; ++i) {
      if (mem_wb_) {
        V[static_cast<size_t>(i)] = wb_V_mem_[static_cast<size_t>(i)];
        v[static_cast<size_t>(i)] = wb_v_mem_[static_cast<size_t>(i)];
      } else {
        V[static_cast<size_t>(i)] =
            Eigen::MatrixXd::Identity(d_ + 1, d_ + 1) / (gamma_prior_ * gamma_prior_);
        v[static_cast<size_t>(i)] = Eigen::VectorXd::Zero(d_ + 1);
      }
    }
    for (int s = lo; s <= t_max_; ++s) {
      const Round& r = round(s);
      Eigen::VectorXd z(d_ + 1);
      z.head(d_) = r.h_mean;
      z[d_] = 1.0;
      Eigen::MatrixXd zz = z * z.transpose();
      zz.topLeftCorner(d_, d_) += r.h_cov;
      for (size_t j = 0; j < r.selected.size(); ++j) {
        const auto arm = static_cast<size_t>(r.selected[j]);
        V[arm].noalias() += zz / sig2;
        v[arm].noalias() += z * (r.rewards[j] / sig2);
      }
    }
    for (int i = 0; i < K_; ++i) {
      auto llt = checked_llt(V[static_cast<size_t>(i)],
                             "latent sweep: emission precision not PD");
      const Eigen::VectorXd mean = llt.solve(v[static_cast<size_t>(i)]);
      delta_max = std::max(delta_max,
                           (mean - wb_mean_[static_cast<size_t>(i)]).cwiseAbs().maxCoeff());
      wb_mean_[static_cast<size_t>(i)] = mean;
      wb_cov_[static_cast<size_t>(i)] = llt.solve(Eigen::MatrixXd::Identity(d_ + 1, d_ + 1));
    }
  }
  return delta_max;
}

// ---------------------------------------------------------------------------
// RecurrentStateTsPolicy

RecurrentStateTsPolicy::RecurrentStateTsPolicy(RstsConfig cfg) : cfg_(cfg) {
  if (cfg_.nbIt < 1) throw InvalidParameter("recurrent state TS: nbIt must be >= 1");
}

void RecurrentStateTsPolicy::reset(int num_arms, int k, Rng rng) {
  rng_ = rng;
  k_ = k;
  K_ = num_arms;
  state_ = std::make_unique<LatentState>(num_arms, cfg_.d, cfg_.sigma, cfg_.delta_lds,
                                         cfg_.alpha_prior, cfg_.gamma_prior, cfg_.window,
                                         cfg_.mem_theta, cfg_.mem_wb, &rng_);
  pulls_.assign(static_cast<size_t>(num_arms), 0);
}

std::vector<ArmId> RecurrentStateTsPolicy::select(int t, const std::vector<ArmId>& known,
                                                  const Observation&) {
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("recurrent state TS: fewer known arms than k");
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  const int d = cfg_.d;
  if (t == 1) {
    Eigen::VectorXd h(d);
    for (int j = 0; j < d; ++j) h[j] = rng_.normal(0.0, cfg_.delta_lds);
    for (ArmId i : known) {
      if (pulls_[static_cast<size_t>(i)] == 0) {
        scores.emplace_back(i, kInf);
        continue;
      }
      Eigen::VectorXd wb(d + 1);
      for (int j = 0; j <= d; ++j) wb[j] = rng_.normal(0.0, cfg_.gamma_prior);
      scores.emplace_back(i, wb.head(d).dot(h) + wb[d]);
    }
    return top_k(scores, k_);
  }
  state_->sweep(cfg_.nbIt);
  const Eigen::VectorXd h_draw =
      sample_mvn(rng_, state_->h_mean(t - 1), state_->h_cov(t - 1));
  const Eigen::MatrixXd L_theta = chol(state_->theta_cov());
  Eigen::MatrixXd theta_draw(d, d);
  Eigen::VectorXd z(d);
  for (int row = 0; row < d; ++row) {
    for (int j = 0; j < d; ++j) z[j] = rng_.normal();
    theta_draw.row(row) = state_->theta_mean().row(row) + (L_theta * z).transpose();
  }
  const Eigen::VectorXd th = theta_draw * h_draw;
  for (ArmId i : known) {
    if (pulls_[static_cast<size_t>(i)] == 0) {
      scores.emplace_back(i, kInf);
      continue;
    }
    const Eigen::VectorXd wb = sample_mvn(rng_, state_->wb_mean(i), state_->wb_cov(i));
    scores.emplace_back(i, wb.head(d).dot(th) + wb[d]);
  }
  return top_k(scores, k_);
}

void RecurrentStateTsPolicy::update(const RoundLog& round) {
  check_round_order(round.t);
  for (ArmId i : round.selected) pulls_[static_cast<size_t>(i)] += 1;
  state_->add_round(round.t, round.selected, round.rewards);
}

std::string RecurrentStateTsPolicy::name() const {
  return "recurrent_state_ts_d" + std::to_string(cfg_.d);
}

// ---------------------------------------------------------------------------
// RevealedRewardTsPolicy

RevealedRewardTsPolicy::RevealedRewardTsPolicy(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0)) throw InvalidParameter("revealed reward TS: sigma must be positive");
}

void RevealedRewardTsPolicy::reset(int num_arms, int k, Rng rng) {
  rng_ = rng;
  k_ = k;
  K_ = num_arms;
  V_ = Eigen::MatrixXd::Identity(K_ + 1, K_ + 1);
  B_ = Eigen::MatrixXd::Zero(K_ + 1, K_);
  prev_rewards_.resize(0);
  have_prev_ = false;
  pulls_.assign(static_cast<size_t>(num_arms), 0);
}

std::vector<ArmId> RevealedRewardTsPolicy::select(int, const std::vector<ArmId>& known,
                                                  const Observation&) {
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("revealed reward TS: fewer known arms than k");
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  if (!have_prev_) {
    for (ArmId i : known)
      scores.emplace_back(i, pulls_[static_cast<size_t>(i)] == 0 ? kInf : rng_.normal());
    return top_k(scores, k_);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(V_);
  if (llt.info() != Eigen::Success)
    throw NonPsdCovariance("revealed reward TS: V not positive definite");
  Eigen::VectorXd ctx(K_ + 1);
  ctx.head(K_) = prev_rewards_;
  ctx[K_] = 1.0;
  const Eigen::MatrixXd U = llt.matrixU();
  Eigen::VectorXd z(K_ + 1);
  for (ArmId i : known) {
    if (pulls_[static_cast<size_t>(i)] == 0) {
      scores.emplace_back(i, kInf);
      continue;
    }
    const Eigen::VectorXd mean = llt.solve(B_.col(i));
    for (int j = 0; j <= K_; ++j) z[j] = rng_.normal();
    const Eigen::VectorXd draw =
        mean + sigma_ * U.triangularView<Eigen::Upper>().solve(z);
    scores.emplace_back(i, draw.dot(ctx));
  }
  return top_k(scores, k_);
}

void RevealedRewardTsPolicy::update(const RoundLog& round) {
  check_round_order(round.t);
  for (ArmId i : round.selected) pulls_[static_cast<size_t>(i)] += 1;
  if (round.full_rewards.empty())
    throw Error("revealed reward TS requires an environment exposing full rewards");
  Eigen::VectorXd now =
      Eigen::Map<const Eigen::VectorXd>(round.full_rewards.data(), K_);
  if (have_prev_) {
    Eigen::VectorXd z(K_ + 1);
    z.head(K_) = prev_rewards_;
    z[K_] = 1.0;
    V_.noalias() += z * z.transpose();
    B_.noalias() += z * now.transpose();
  }
  prev_rewards_ = now;
  have_prev_ = true;
}

std::string RevealedRewardTsPolicy::name() const { return "revealed_reward_ts"; }

}  // namespace banditstream
