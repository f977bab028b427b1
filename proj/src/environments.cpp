#include "banditstream/environments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace banditstream {

namespace {

std::vector<ArmId> top_k_values(const std::vector<double>& values, int k) {
  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    scores.emplace_back(static_cast<ArmId>(i), values[i]);
  return top_k(scores, k);
}

double sum_at(const std::vector<double>& values, const std::vector<ArmId>& arms) {
  double s = 0.0;
  for (ArmId i : arms) s += values[static_cast<size_t>(i)];
  return s;
}

}  // namespace

bool spectral_check(const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd M = A.transpose() * A;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(M.rows());
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd w = M * v;
    const double norm = w.norm();
    if (norm == 0.0) return true;
    w /= norm;
    const double next = w.dot(M * w);
    const bool converged = std::abs(next - lambda) <= 1e-9 * std::max(1.0, std::abs(next));
    lambda = next;
    v = w;
    if (converged && it > 2) break;
  }
  return lambda <= 1.0 + 1e-9;
}

double RewardWeights::reward(const std::array<long long, 5>& counts) const {
  double s = 0.0;
  for (size_t k = 0; k < 5; ++k) s += alpha[k] * static_cast<double>(counts[k]);
  return std::tanh(s);
}

// ---------------------------------------------------------------------------
// StationaryEnv

StationaryEnv::StationaryEnv(std::vector<double> means, StationaryDist dist,
                             double sigma, ObservationProcess obs)
    : means_(std::move(means)), dist_(dist), sigma_(sigma), obs_(obs) {
  if (means_.empty()) throw InvalidParameter("stationary env: means must be non-empty");
  if (dist_ == StationaryDist::Bernoulli)
    for (double m : means_)
      if (m < 0.0 || m > 1.0)
        throw InvalidParameter("stationary env: Bernoulli means must lie in [0, 1]");
  if (dist_ == StationaryDist::Gaussian && sigma_ < 0.0)
    throw InvalidParameter("stationary env: sigma must be nonnegative");
}

void StationaryEnv::reset(Rng rng) { rng_ = rng; }

Observation StationaryEnv::observe(int, const std::vector<ArmId>& prev_selected) {
  std::vector<ArmId> known(means_.size());
  for (size_t i = 0; i < means_.size(); ++i) known[i] = static_cast<ArmId>(i);
  Observation out;
  out.arms = obs_.draw(rng_, num_arms(), known, prev_selected);
  return out;
}

StepResult StationaryEnv::step(int, const std::vector<ArmId>& selected) {
  StepResult res;
  res.rewards.reserve(selected.size());
  res.truth.reserve(selected.size());
  for (ArmId i : selected) {
    const double m = means_[static_cast<size_t>(i)];
    double r;
    if (dist_ == StationaryDist::Bernoulli)
      r = rng_.uniform() < m ? 1.0 : 0.0;
    else
      r = sigma_ == 0.0 ? m : rng_.normal(m, sigma_);
    res.rewards.push_back(r);
    res.truth.push_back(m);
  }
  res.oracle_value = sum_at(means_, top_k_values(means_, static_cast<int>(selected.size())));
  return res;
}

std::vector<ArmId> StationaryEnv::oracle_set(int, int k) { return top_k_values(means_, k); }

nlohmann::json StationaryEnv::manifest(bool) const {
  return {{"kind", name()},
          {"K", num_arms()},
          {"sigma", sigma_},
          {"obs", to_string(obs_.mode)},
          {"obs_p", obs_.p},
          {"means", means_}};
}

std::string StationaryEnv::name() const {
  return dist_ == StationaryDist::Bernoulli ? "stationary_bernoulli" : "stationary_gaussian";
}

// ---------------------------------------------------------------------------
// LinearProfileEnv

LinearProfileEnv::LinearProfileEnv(int K, int d, double L, double S,
                                   double sigma_profile, double reward_noise_sd,
                                   ObservationProcess obs)
    : K_(K), d_(d), L_(L), S_(S), sigma_profile_(sigma_profile),
      reward_noise_sd_(reward_noise_sd), obs_(obs) {
  if (K < 1 || d < 1 || !(L > 0.0) || !(S > 0.0) || !(sigma_profile > 0.0) ||
      reward_noise_sd < 0.0)
    throw InvalidParameter("linear profile env: invalid parameters");
}

void LinearProfileEnv::reset(Rng rng) {
  rng_ = rng;
  const double bb = S_ / std::sqrt(static_cast<double>(d_));
  beta_.resize(d_);
  for (int j = 0; j < d_; ++j) beta_[j] = rng_.uniform(-bb, bb);
  const double pb = L_ / std::sqrt(static_cast<double>(d_));
  profiles_.assign(static_cast<size_t>(K_), Eigen::VectorXd(d_));
  expected_.resize(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i) {
    for (int j = 0; j < d_; ++j) profiles_[static_cast<size_t>(i)][j] = rng_.uniform(-pb, pb);
    expected_[static_cast<size_t>(i)] = profiles_[static_cast<size_t>(i)].dot(beta_);
  }
}

Observation LinearProfileEnv::observe(int, const std::vector<ArmId>& prev_selected) {
  std::vector<ArmId> known(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i) known[static_cast<size_t>(i)] = i;
  Observation out;
  out.arms = obs_.draw(rng_, K_, known, prev_selected);
  out.contexts.reserve(out.arms.size());
  for (ArmId i : out.arms)
    out.contexts.push_back(
        sample_truncated_gaussian(rng_, profiles_[static_cast<size_t>(i)], sigma_profile_, L_));
  return out;
}

StepResult LinearProfileEnv::step(int, const std::vector<ArmId>& selected) {
  StepResult res;
  for (ArmId i : selected) {
    const double m = expected_[static_cast<size_t>(i)];
    res.rewards.push_back(reward_noise_sd_ == 0.0 ? m : rng_.normal(m, reward_noise_sd_));
    res.truth.push_back(m);
  }
  res.oracle_value =
      sum_at(expected_, top_k_values(expected_, static_cast<int>(selected.size())));
  return res;
}

std::vector<ArmId> LinearProfileEnv::oracle_set(int, int k) {
  return top_k_values(expected_, k);
}

nlohmann::json LinearProfileEnv::manifest(bool dump_truth) const {
  nlohmann::json j{{"kind", name()},       {"K", K_},
                   {"d", d_},              {"L", L_},
                   {"S", S_},              {"sigma_profile", sigma_profile_},
                   {"reward_noise_sd", reward_noise_sd_},
                   {"obs", to_string(obs_.mode)},
                   {"obs_p", obs_.p}};
  if (dump_truth) {
    j["beta"] = std::vector<double>(beta_.data(), beta_.data() + beta_.size());
    j["expected"] = expected_;
  }
  return j;
}

std::string LinearProfileEnv::name() const { return "linear_profile"; }

// ---------------------------------------------------------------------------
// VariableContextEnv

VariableContextEnv::VariableContextEnv(int K, int d, double a0, double b0, double S,
                                       double reward_sigma, ObservationProcess obs)
    : K_(K), d_(d), a0_(a0), b0_(b0), S_(S), reward_sigma_(reward_sigma), obs_(obs) {
  if (K < 1 || d < 1 || !(a0 > 0.0) || !(b0 > 0.0) || !(S > 0.0) || reward_sigma < 0.0)
    throw InvalidParameter("variable context env: invalid parameters");
}

void VariableContextEnv::reset(Rng rng) {
  rng_ = rng;
  current_t_ = 0;
  const double bb = S_ / std::sqrt(static_cast<double>(d_));
  beta_.resize(d_);
  for (int j = 0; j < d_; ++j) beta_[j] = rng_.uniform(-bb, bb);
  tau_.resize(static_cast<size_t>(K_));
  mu_.assign(static_cast<size_t>(K_), Eigen::VectorXd(d_));
  for (int i = 0; i < K_; ++i) {
    tau_[static_cast<size_t>(i)] = sample_gamma(rng_, a0_, b0_);
    const double sd = 1.0 / std::sqrt(tau_[static_cast<size_t>(i)]);
    for (int j = 0; j < d_; ++j) mu_[static_cast<size_t>(i)][j] = rng_.normal(0.0, sd);
  }
  contexts_.assign(static_cast<size_t>(K_), Eigen::VectorXd::Zero(d_));
  values_.assign(static_cast<size_t>(K_), 0.0);
}

void VariableContextEnv::ensure_round(int t) {
  if (t == current_t_) return;
  if (t != current_t_ + 1)
    throw Error("variable context env: rounds must advance one at a time");
  current_t_ = t;
  for (int i = 0; i < K_; ++i) {
    const double sd = 1.0 / std::sqrt(tau_[static_cast<size_t>(i)]);
    for (int j = 0; j < d_; ++j)
      contexts_[static_cast<size_t>(i)][j] = mu_[static_cast<size_t>(i)][j] + sd * rng_.normal();
    values_[static_cast<size_t>(i)] = contexts_[static_cast<size_t>(i)].dot(beta_);
  }
}

Observation VariableContextEnv::observe(int t, const std::vector<ArmId>& prev_selected) {
  ensure_round(t);
  std::vector<ArmId> known(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i) known[static_cast<size_t>(i)] = i;
  Observation out;
  out.arms = obs_.draw(rng_, K_, known, prev_selected);
  out.contexts.reserve(out.arms.size());
  for (ArmId i : out.arms) out.contexts.push_back(contexts_[static_cast<size_t>(i)]);
  return out;
}

StepResult VariableContextEnv::step(int t, const std::vector<ArmId>& selected) {
  ensure_round(t);
  StepResult res;
  for (ArmId i : selected) {
    const double m = values_[static_cast<size_t>(i)];
    res.rewards.push_back(reward_sigma_ == 0.0 ? m : rng_.normal(m, reward_sigma_));
    res.truth.push_back(m);
  }
  res.oracle_value = sum_at(values_, top_k_values(values_, static_cast<int>(selected.size())));
  return res;
}

std::vector<ArmId> VariableContextEnv::oracle_set(int t, int k) {
  ensure_round(t);
  return top_k_values(values_, k);
}

nlohmann::json VariableContextEnv::manifest(bool dump_truth) const {
  nlohmann::json j{{"kind", name()}, {"K", K_}, {"d", d_},
                   {"a0", a0_},      {"b0", b0_}, {"S", S_},
                   {"reward_sigma", reward_sigma_},
                   {"obs", to_string(obs_.mode)}, {"obs_p", obs_.p}};
  if (dump_truth) {
    j["beta"] = std::vector<double>(beta_.data(), beta_.data() + beta_.size());
    j["tau"] = tau_;
  }
  return j;
}

std::string VariableContextEnv::name() const { return "variable_context"; }

// ---------------------------------------------------------------------------
// RecurrentVarEnv

RecurrentVarEnv::RecurrentVarEnv(int K, double sigma, double alpha_prior,
                                 double mu_prior, ObservationProcess obs)
    : K_(K), sigma_(sigma), alpha_prior_(alpha_prior), mu_prior_(mu_prior), obs_(obs) {
  if (K < 1 || !(sigma > 0.0) || !(alpha_prior > 0.0))
    throw InvalidParameter("recurrent var env: invalid parameters");
}

void RecurrentVarEnv::reset(Rng rng) {
  rng_ = rng;
  current_t_ = 0;
  theta_.resize(K_, K_ + 1);
  for (int i = 0; i < K_; ++i)
    for (int j = 0; j <= K_; ++j) theta_(i, j) = rng_.normal(0.0, alpha_prior_);
  // Non-divergence gate: rescale the weight rows until the inter-arm block
  // passes. The check leaves out the bias column; with it the strict bound
  // is unreachable for any nonzero bias weight.
  while (!spectral_check(theta_.leftCols(K_))) theta_ *= 0.95;
  rewards_now_.resize(K_);
  rewards_prev_.resize(K_);
  truth_now_.resize(K_);
}

void RecurrentVarEnv::ensure_round(int t) {
  if (t == current_t_) return;
  if (t != current_t_ + 1)
    throw Error("recurrent var env: rounds must advance one at a time");
  current_t_ = t;
  if (t == 1) {
    truth_now_.setConstant(mu_prior_);
    for (int i = 0; i < K_; ++i) rewards_now_[i] = rng_.normal(mu_prior_, sigma_);
    return;
  }
  rewards_prev_ = rewards_now_;
  Eigen::VectorXd z(K_ + 1);
  z.head(K_) = rewards_prev_;
  z[K_] = 1.0;
  truth_now_ = theta_ * z;
  for (int i = 0; i < K_; ++i) rewards_now_[i] = truth_now_[i] + rng_.normal(0.0, sigma_);
}

Observation RecurrentVarEnv::observe(int t, const std::vector<ArmId>& prev_selected) {
  ensure_round(t);
  std::vector<ArmId> known(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i) known[static_cast<size_t>(i)] = i;
  Observation out;
  out.arms = obs_.draw(rng_, K_, known, prev_selected);
  return out;
}

StepResult RecurrentVarEnv::step(int t, const std::vector<ArmId>& selected) {
  ensure_round(t);
  StepResult res;
  std::vector<double> truth(truth_now_.data(), truth_now_.data() + K_);
  for (ArmId i : selected) {
    res.rewards.push_back(rewards_now_[i]);
    res.truth.push_back(truth[static_cast<size_t>(i)]);
  }
  res.oracle_value = sum_at(truth, top_k_values(truth, static_cast<int>(selected.size())));
  return res;
}

std::vector<ArmId> RecurrentVarEnv::oracle_set(int t, int k) {
  ensure_round(t);
  std::vector<double> truth(truth_now_.data(), truth_now_.data() + K_);
  return top_k_values(truth, k);
}

std::vector<double> RecurrentVarEnv::full_rewards(int t) const {
  if (t != current_t_) throw Error("recurrent var env: full rewards only for the current round");
  return std::vector<double>(rewards_now_.data(), rewards_now_.data() + K_);
}

nlohmann::json RecurrentVarEnv::manifest(bool dump_truth) const {
  nlohmann::json j{{"kind", name()},          {"K", K_},
                   {"sigma", sigma_},         {"alpha_prior", alpha_prior_},
                   {"mu_prior", mu_prior_},   {"spectral_rescale", 0.95},
                   {"obs", to_string(obs_.mode)}, {"obs_p", obs_.p}};
  if (dump_truth) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < K_; ++i)
      rows.emplace_back(theta_.row(i).data(), theta_.row(i).data() + K_ + 1);
    j["theta"] = rows;
  }
  return j;
}

std::string RecurrentVarEnv::name() const { return "recurrent_var"; }

// ---------------------------------------------------------------------------
// PeriodicEnv

PeriodicEnv::PeriodicEnv(int K, int cycle_len, int n_periods, int period_len,
                         double reward_sigma, ObservationProcess obs)
    : K_(K), cycle_len_(cycle_len), n_periods_(n_periods), period_len_(period_len),
      reward_sigma_(reward_sigma), obs_(obs) {
  if (K < 1 || cycle_len < 1 || n_periods < 1 || period_len < 1 || reward_sigma < 0.0)
    throw InvalidParameter("periodic env: invalid parameters");
  if (cycle_len != n_periods * period_len)
    throw InvalidParameter("periodic env: cycle_len must equal n_periods * period_len");
}

void PeriodicEnv::reset(Rng rng) {
  rng_ = rng;
  means_.resize(static_cast<size_t>(K_));
  arm_period_.resize(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i) {
    means_[static_cast<size_t>(i)] = rng_.uniform();
    arm_period_[static_cast<size_t>(i)] = 1 + rng_.uniform_int(n_periods_);
  }
}

int PeriodicEnv::period_of(int t) const { return ((t - 1) % cycle_len_) / period_len_ + 1; }

bool PeriodicEnv::active(ArmId i, int t) const {
  return arm_period_[static_cast<size_t>(i)] == period_of(t);
}

Observation PeriodicEnv::observe(int, const std::vector<ArmId>& prev_selected) {
  std::vector<ArmId> known(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i) known[static_cast<size_t>(i)] = i;
  Observation out;
  out.arms = obs_.draw(rng_, K_, known, prev_selected);
  return out;
}

StepResult PeriodicEnv::step(int t, const std::vector<ArmId>& selected) {
  StepResult res;
  std::vector<double> truth(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i)
    truth[static_cast<size_t>(i)] = active(i, t) ? means_[static_cast<size_t>(i)] : 0.0;
  for (ArmId i : selected) {
    const double m = truth[static_cast<size_t>(i)];
    double r = 0.0;
    if (active(i, t))
      r = reward_sigma_ == 0.0 ? m : rng_.normal(m, reward_sigma_);
    res.rewards.push_back(r);
    res.truth.push_back(m);
  }
  res.oracle_value = sum_at(truth, top_k_values(truth, static_cast<int>(selected.size())));
  return res;
}

std::vector<ArmId> PeriodicEnv::oracle_set(int t, int k) {
  std::vector<double> truth(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i)
    truth[static_cast<size_t>(i)] = active(i, t) ? means_[static_cast<size_t>(i)] : 0.0;
  return top_k_values(truth, k);
}

nlohmann::json PeriodicEnv::manifest(bool dump_truth) const {
  nlohmann::json j{{"kind", name()},          {"K", K_},
                   {"cycle_len", cycle_len_}, {"n_periods", n_periods_},
                   {"period_len", period_len_}, {"reward_sigma", reward_sigma_},
                   {"obs", to_string(obs_.mode)}, {"obs_p", obs_.p}};
  if (dump_truth) {
    j["means"] = means_;
    j["arm_period"] = arm_period_;
  }
  return j;
}

std::string PeriodicEnv::name() const { return "periodic"; }

// ---------------------------------------------------------------------------
// PeriodicRandomEnv

PeriodicRandomEnv::PeriodicRandomEnv(int K, double reward_sigma, ObservationProcess obs)
    : K_(K), reward_sigma_(reward_sigma), obs_(obs) {
  if (K < 1 || reward_sigma < 0.0)
    throw InvalidParameter("periodic random env: invalid parameters");
}

void PeriodicRandomEnv::reset(Rng rng) {
  rng_ = rng;
  means_.resize(static_cast<size_t>(K_));
  per_.resize(static_cast<size_t>(K_));
  it_.resize(static_cast<size_t>(K_));
  arm_period_.resize(static_cast<size_t>(K_));
  static const int pers[] = {2, 3, 4, 5};
  static const int its[] = {10, 20, 30, 40};
  for (int i = 0; i < K_; ++i) {
    means_[static_cast<size_t>(i)] = rng_.uniform();
    per_[static_cast<size_t>(i)] = pers[rng_.uniform_int(4)];
    it_[static_cast<size_t>(i)] = its[rng_.uniform_int(4)];
    arm_period_[static_cast<size_t>(i)] = 1 + rng_.uniform_int(per_[static_cast<size_t>(i)]);
  }
}

bool PeriodicRandomEnv::active(ArmId i, int t) const {
  const int period = ((t - 1) / it_[static_cast<size_t>(i)]) % per_[static_cast<size_t>(i)] + 1;
  return period == arm_period_[static_cast<size_t>(i)];
}

Observation PeriodicRandomEnv::observe(int, const std::vector<ArmId>& prev_selected) {
  std::vector<ArmId> known(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i) known[static_cast<size_t>(i)] = i;
  Observation out;
  out.arms = obs_.draw(rng_, K_, known, prev_selected);
  return out;
}

StepResult PeriodicRandomEnv::step(int t, const std::vector<ArmId>& selected) {
  StepResult res;
  std::vector<double> truth(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i)
    truth[static_cast<size_t>(i)] = active(i, t) ? means_[static_cast<size_t>(i)] : 0.0;
  for (ArmId i : selected) {
    const double m = truth[static_cast<size_t>(i)];
    double r = 0.0;
    if (active(i, t))
      r = reward_sigma_ == 0.0 ? m : rng_.normal(m, reward_sigma_);
    res.rewards.push_back(r);
    res.truth.push_back(m);
  }
  res.oracle_value = sum_at(truth, top_k_values(truth, static_cast<int>(selected.size())));
  return res;
}

std::vector<ArmId> PeriodicRandomEnv::oracle_set(int t, int k) {
  std::vector<double> truth(static_cast<size_t>(K_));
  for (int i = 0; i < K_; ++i)
    truth[static_cast<size_t>(i)] = active(i, t) ? means_[static_cast<size_t>(i)] : 0.0;
  return top_k_values(truth, k);
}

nlohmann::json PeriodicRandomEnv::manifest(bool dump_truth) const {
  nlohmann::json j{{"kind", name()}, {"K", K_}, {"reward_sigma", reward_sigma_},
                   {"obs", to_string(obs_.mode)}, {"obs_p", obs_.p}};
  if (dump_truth) {
    j["means"] = means_;
    j["per"] = per_;
    j["it"] = it_;
    j["arm_period"] = arm_period_;
  }
  return j;
}

std::string PeriodicRandomEnv::name() const { return "periodic_random"; }

// ---------------------------------------------------------------------------
// TraceReplayEnv

TraceReplayEnv::TraceReplayEnv(const std::string& path, RewardWeights weights, int K,
                               int T, bool dynamic_arms, int max_new,
                               ObservationProcess obs)
    : path_(path), weights_(weights), K_(K), T_(T), dynamic_arms_(dynamic_arms),
      max_new_(max_new), obs_(obs) {
  if (K < 1 || T < 1) throw InvalidParameter("trace replay env: K and T must be positive");
  for (double a : weights_.alpha)
    if (a < 0.0) throw InvalidParameter("trace replay env: weights must be nonnegative");
  std::ifstream in(path_);
  if (!in) throw IoError("trace replay env: cannot open " + path_);
  std::string line;
  if (!std::getline(in, line)) throw MalformedTrace("trace file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,arm,c0,c1,c2,c3,c4")
    throw MalformedTrace("trace header must be `t,arm,c0,c1,c2,c3,c4`");
  rewards_.assign(static_cast<size_t>(T_), std::vector<double>(static_cast<size_t>(K_), 0.0));
  first_active_.assign(static_cast<size_t>(K_), T_ + 1);
  int prev_t = 0;
  int max_t = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    long long vals[7];
    for (int f = 0; f < 7; ++f) {
      if (!std::getline(ss, field, ','))
        throw MalformedTrace("trace line " + std::to_string(line_no) + ": expected 7 fields");
      try {
        size_t pos = 0;
        vals[f] = std::stoll(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw MalformedTrace("trace line " + std::to_string(line_no) + ": bad integer `" +
                             field + "`");
      }
    }
    if (std::getline(ss, field, ','))
      throw MalformedTrace("trace line " + std::to_string(line_no) + ": too many fields");
    const int t = static_cast<int>(vals[0]);
    const int arm = static_cast<int>(vals[1]);
    if (t < 1) throw MalformedTrace("trace line " + std::to_string(line_no) + ": t must be >= 1");
    if (t < prev_t)
      throw MalformedTrace("trace line " + std::to_string(line_no) + ": t must be ascending");
    if (arm < 0 || arm >= K_)
      throw MalformedTrace("trace line " + std::to_string(line_no) + ": arm out of range");
    std::array<long long, 5> counts{};
    bool any = false;
    for (int c = 0; c < 5; ++c) {
      if (vals[2 + c] < 0)
        throw MalformedTrace("trace line " + std::to_string(line_no) + ": negative count");
      counts[static_cast<size_t>(c)] = vals[2 + c];
      any = any || vals[2 + c] > 0;
    }
    prev_t = t;
    max_t = std::max(max_t, t);
    if (t <= T_) {
      rewards_[static_cast<size_t>(t - 1)][static_cast<size_t>(arm)] = weights_.reward(counts);
      if (any)
        first_active_[static_cast<size_t>(arm)] =
            std::min(first_active_[static_cast<size_t>(arm)], t);
    }
  }
  if (max_t < T_)
    throw MissingRound("trace ends at t=" + std::to_string(max_t) + " but T=" +
                       std::to_string(T_));
}

void TraceReplayEnv::reset(Rng rng) {
  rng_ = rng;
  known_.assign(static_cast<size_t>(K_), 0);
  pending_.clear();
  arrivals_t_ = 0;
}

double TraceReplayEnv::reward_at(int t, ArmId i) const {
  return rewards_[static_cast<size_t>(t - 1)][static_cast<size_t>(i)];
}

std::vector<ArmId> TraceReplayEnv::newly_known(int t) {
  if (!dynamic_arms_) return Environment::newly_known(t);
  if (t != arrivals_t_ + 1) throw Error("trace replay env: arrivals queried out of order");
  arrivals_t_ = t;
  for (int i = 0; i < K_; ++i)
    if (first_active_[static_cast<size_t>(i)] == t) pending_.push_back(i);
  std::vector<ArmId> out;
  const int budget = max_new_ > 0 ? max_new_ : static_cast<int>(pending_.size());
  while (!pending_.empty() && static_cast<int>(out.size()) < budget) {
    out.push_back(pending_.front());
    pending_.erase(pending_.begin());
  }
  for (ArmId i : out) known_[static_cast<size_t>(i)] = 1;
  return out;
}

Observation TraceReplayEnv::observe(int, const std::vector<ArmId>& prev_selected) {
  std::vector<ArmId> known;
  if (dynamic_arms_) {
    for (int i = 0; i < K_; ++i)
      if (known_[static_cast<size_t>(i)]) known.push_back(i);
  } else {
    known.resize(static_cast<size_t>(K_));
    for (int i = 0; i < K_; ++i) known[static_cast<size_t>(i)] = i;
  }
  Observation out;
  out.arms = obs_.draw(rng_, K_, known, prev_selected);
  return out;
}

StepResult TraceReplayEnv::step(int t, const std::vector<ArmId>& selected) {
  if (t > T_) throw MissingRound("trace replay env: round past the trace horizon");
  StepResult res;
  const auto& row = rewards_[static_cast<size_t>(t - 1)];
  for (ArmId i : selected) {
    res.rewards.push_back(row[static_cast<size_t>(i)]);
    res.truth.push_back(row[static_cast<size_t>(i)]);
  }
  res.oracle_value = sum_at(row, top_k_values(row, static_cast<int>(selected.size())));
  return res;
}

std::vector<ArmId> TraceReplayEnv::oracle_set(int t, int k) {
  return top_k_values(rewards_[static_cast<size_t>(t - 1)], k);
}

nlohmann::json TraceReplayEnv::manifest(bool) const {
  return {{"kind", name()},
          {"path", path_},
          {"K", K_},
          {"T", T_},
          {"alpha", weights_.alpha},
          {"dynamic_arms", dynamic_arms_},
          {"max_new", max_new_},
          {"obs", to_string(obs_.mode)},
          {"obs_p", obs_.p}};
}

std::string TraceReplayEnv::name() const { return "trace_replay"; }

}  // namespace banditstream
