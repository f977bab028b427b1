#include "banditstream/policies_stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstdio>
#include <limits>

namespace banditstream {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// One warning per process; parallel runs would otherwise flood stderr.
std::atomic<bool> g_warned_reward_bound{false};
}

StochasticKind stochastic_kind_from_string(const std::string& name) {
  if (name == "random") return StochasticKind::Random;
  if (name == "epsilon_greedy") return StochasticKind::EpsilonGreedy;
  if (name == "ucb") return StochasticKind::UCB;
  if (name == "cucb") return StochasticKind::CUCB;
  if (name == "cucbv" || name == "ucbv") return StochasticKind::CUCBV;
  if (name == "ucb_delta") return StochasticKind::UcbDelta;
  if (name == "moss") return StochasticKind::MOSS;
  if (name == "ts_bernoulli") return StochasticKind::TsBernoulli;
  if (name == "ts_bounded") return StochasticKind::TsBounded;
  if (name == "ts_gaussian") return StochasticKind::TsGaussian;
  if (name == "discounted_ucb") return StochasticKind::DiscountedUCB;
  if (name == "sliding_window_ucb") return StochasticKind::SlidingWindowUCB;
  throw ConfigError("unknown stochastic policy: " + name);
}

std::string to_string(StochasticKind kind) {
  switch (kind) {
    case StochasticKind::Random: return "random";
    case StochasticKind::EpsilonGreedy: return "epsilon_greedy";
    case StochasticKind::UCB: return "ucb";
    case StochasticKind::CUCB: return "cucb";
    case StochasticKind::CUCBV: return "cucbv";
    case StochasticKind::UcbDelta: return "ucb_delta";
    case StochasticKind::MOSS: return "moss";
    case StochasticKind::TsBernoulli: return "ts_bernoulli";
    case StochasticKind::TsBounded: return "ts_bounded";
    case StochasticKind::TsGaussian: return "ts_gaussian";
    case StochasticKind::DiscountedUCB: return "discounted_ucb";
    case StochasticKind::SlidingWindowUCB: return "sliding_window_ucb";
  }
  return "?";
}

void StochasticPolicyConfig::validate() const {
  if (!(b > 0.0)) throw InvalidParameter("stochastic policy: b must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidParameter("stochastic policy: delta must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw InvalidParameter("stochastic policy: gamma must lie in (0, 1]");
  if (tau < 1) throw InvalidParameter("stochastic policy: tau must be >= 1");
  if (a < 0.0 || c < 0.0)
    throw InvalidParameter("stochastic policy: a and c must be nonnegative");
  if (kind == StochasticKind::MOSS && T < 1)
    throw InvalidParameter("moss requires the horizon T");
  if (!(ts_b > 0.0) || !(ts_sigma > 0.0))
    throw InvalidParameter("gaussian TS: prior variance and sigma must be positive");
}

double ucb_score(const ArmStats& stats, long long t, double b) {
  if (stats.n == 0) return kInf;
  return stats.mean() +
         std::sqrt(2.0 * b * b * std::log(static_cast<double>(t)) /
                   static_cast<double>(stats.n));
}

double cucbv_score(const ArmStats& stats, long long t, double a, double c, double b) {
  if (stats.n == 0) return kInf;
  const double logt = std::log(static_cast<double>(t));
  const double N = static_cast<double>(stats.n);
  return stats.mean() + std::sqrt(2.0 * a * stats.variance() * logt / N) +
         3.0 * c * b * logt / N;
}

double ucb_delta_score(const ArmStats& stats, int K, double delta) {
  if (stats.n == 0) return kInf;
  const double N = static_cast<double>(stats.n);
  const double inner = 1.0 + 2.0 * std::log(K * std::sqrt(1.0 + N) / delta);
  return stats.mean() + std::sqrt((1.0 + N) / (N * N) * inner);
}

double moss_score(const ArmStats& stats, long long T, int K) {
  if (stats.n == 0) return kInf;
  const double N = static_cast<double>(stats.n);
  const double bonus =
      std::max(std::log(static_cast<double>(T) / (static_cast<double>(K) * N)), 0.0);
  return stats.mean() + std::sqrt(bonus / N);
}

double discounted_ucb_score(double disc_sum, double disc_n, double n_gamma_total,
                            double b, double xi) {
  if (disc_n <= 0.0) return kInf;
  const double mean = disc_sum / disc_n;
  return mean + 2.0 * b * std::sqrt(xi * std::log(n_gamma_total) / disc_n);
}

double sliding_window_ucb_score(const ArmStats& stats, long long t, int tau,
                                double b, double xi) {
  if (stats.win_n == 0) return kInf;
  const double horizon = static_cast<double>(std::min<long long>(t, tau));
  return stats.window_mean() +
         b * std::sqrt(xi * std::log(horizon) / static_cast<double>(stats.win_n));
}

double ts_beta_draw(Rng& rng, double S, double F) {
  if (S < 0.0 || F < 0.0) throw InvalidParameter("ts_beta_draw: counts must be >= 0");
  const double x = sample_gamma(rng, S + 1.0, 1.0);
  const double y = sample_gamma(rng, F + 1.0, 1.0);
  return x / (x + y);
}

bool ts_bounded_trial(Rng& rng, double reward) {
  if (reward < 0.0 || reward > 1.0)
    throw RewardOutOfRange("ts_bounded_trial: reward must lie in [0, 1]");
  return rng.uniform() < reward;
}

double ts_gaussian_draw(Rng& rng, long long N, double reward_sum, double a,
                        double b, double sigma) {
  const double prec = static_cast<double>(N) / (sigma * sigma) + 1.0 / b;
  const double mean = (a / b + reward_sum / (sigma * sigma)) / prec;
  return rng.normal(mean, std::sqrt(1.0 / prec));
}

StochasticPolicy::StochasticPolicy(StochasticPolicyConfig cfg) : cfg_(cfg) {
  cfg_.validate();
}

void StochasticPolicy::reset(int num_arms, int k, Rng rng) {
  rng_ = rng;
  k_ = k;
  stats_.assign(static_cast<size_t>(num_arms), ArmStats{});
  if (cfg_.kind == StochasticKind::SlidingWindowUCB)
    for (auto& s : stats_) s.tau = cfg_.tau;
  ts_S_.assign(static_cast<size_t>(num_arms), 0.0);
  ts_F_.assign(static_cast<size_t>(num_arms), 0.0);
}

std::vector<ArmId> StochasticPolicy::select(int t, const std::vector<ArmId>& known,
                                            const Observation&) {
  if (static_cast<int>(known.size()) < k_)
    throw NotEnoughArms("stochastic policy: fewer known arms than k");
  if (cfg_.kind == StochasticKind::EpsilonGreedy) return epsilon_greedy_select(t, known);

  double n_gamma_total = 0.0;
  if (cfg_.kind == StochasticKind::DiscountedUCB) {
    for (ArmId i : known) n_gamma_total += stats_[static_cast<size_t>(i)].disc_n;
    n_gamma_total *= cfg_.gamma;  // stats are decayed through t-1; N_gamma(i,t) adds one factor
  }

  std::vector<std::pair<ArmId, double>> scores;
  scores.reserve(known.size());
  for (ArmId i : known) {
    ArmStats& s = stats_[static_cast<size_t>(i)];
    double score;
    if (s.n == 0) {
      score = kInf;
    } else {
      switch (cfg_.kind) {
        case StochasticKind::Random:
          score = rng_.uniform();
          break;
        case StochasticKind::UCB:
        case StochasticKind::CUCB:
          score = ucb_score(s, t, cfg_.b);
          break;
        case StochasticKind::CUCBV:
          score = cucbv_score(s, t, cfg_.a, cfg_.c, cfg_.b);
          break;
        case StochasticKind::UcbDelta:
          score = ucb_delta_score(s, static_cast<int>(known.size()), cfg_.delta);
          break;
        case StochasticKind::MOSS: {
          const int K = cfg_.K > 0 ? cfg_.K : static_cast<int>(known.size());
          score = moss_score(s, cfg_.T, K);
          break;
        }
        case StochasticKind::TsBernoulli:
        case StochasticKind::TsBounded:
          score = ts_beta_draw(rng_, ts_S_[static_cast<size_t>(i)],
                               ts_F_[static_cast<size_t>(i)]);
          break;
        case StochasticKind::TsGaussian:
          score = ts_gaussian_draw(rng_, s.n, s.sum, cfg_.ts_a, cfg_.ts_b, cfg_.ts_sigma);
          break;
        case StochasticKind::DiscountedUCB:
          score = discounted_ucb_score(cfg_.gamma * s.disc_sum, cfg_.gamma * s.disc_n,
                                       n_gamma_total, cfg_.b, cfg_.xi);
          break;
        case StochasticKind::SlidingWindowUCB:
          s.evict(t);
          score = sliding_window_ucb_score(s, t, cfg_.tau, cfg_.b, cfg_.xi);
          break;
        default:
          score = 0.0;
      }
    }
    scores.emplace_back(i, score);
  }
  return top_k(scores, k_);
}

std::vector<ArmId> StochasticPolicy::epsilon_greedy_select(int t,
                                                           const std::vector<ArmId>& known) {
  const double K = static_cast<double>(known.size());
  const double eps =
      std::min(1.0, cfg_.eps_c * K / (cfg_.eps_d * cfg_.eps_d * static_cast<double>(t)));
  std::vector<char> chosen(stats_.size(), 0);
  std::vector<ArmId> out;
  for (int slot = 0; slot < k_; ++slot) {
    std::vector<ArmId> pool;
    for (ArmId i : known)
      if (!chosen[static_cast<size_t>(i)]) pool.push_back(i);
    ArmId pick;
    if (rng_.uniform() < eps) {
      pick = pool[static_cast<size_t>(rng_.uniform_int(static_cast<int>(pool.size())))];
    } else {
      std::vector<std::pair<ArmId, double>> scores;
      scores.reserve(pool.size());
      for (ArmId i : pool) {
        const ArmStats& s = stats_[static_cast<size_t>(i)];
        scores.emplace_back(i, s.n == 0 ? kInf : s.mean());
      }
      pick = top_k(scores, 1)[0];
    }
    chosen[static_cast<size_t>(pick)] = 1;
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void StochasticPolicy::update(const RoundLog& round) {
  check_round_order(round.t);
  const bool discounted = cfg_.kind == StochasticKind::DiscountedUCB;
  if (discounted)
    for (auto& s : stats_) s.decay(cfg_.gamma);
  for (size_t j = 0; j < round.selected.size(); ++j) {
    const ArmId i = round.selected[j];
    const double r = round.rewards[j];
    ArmStats& s = stats_[static_cast<size_t>(i)];
    s.add(round.t, r);
    if (discounted) s.add_discounted(r);
    switch (cfg_.kind) {
      case StochasticKind::TsBernoulli:
        if (r == 1.0)
          ts_S_[static_cast<size_t>(i)] += 1.0;
        else if (r == 0.0)
          ts_F_[static_cast<size_t>(i)] += 1.0;
        else
          throw RewardOutOfRange("ts_bernoulli: reward must be 0 or 1");
        break;
      case StochasticKind::TsBounded: {
        const double clamped = std::clamp(r, 0.0, cfg_.b) / cfg_.b;
        if (ts_bounded_trial(rng_, clamped))
          ts_S_[static_cast<size_t>(i)] += 1.0;
        else
          ts_F_[static_cast<size_t>(i)] += 1.0;
        break;
      }
      default:
        break;
    }
    if (!warned_reward_bound_ && r > cfg_.b &&
        (cfg_.kind == StochasticKind::UCB || cfg_.kind == StochasticKind::CUCB ||
         cfg_.kind == StochasticKind::CUCBV || cfg_.kind == StochasticKind::MOSS ||
         cfg_.kind == StochasticKind::DiscountedUCB ||
         cfg_.kind == StochasticKind::SlidingWindowUCB)) {
      warned_reward_bound_ = true;
      if (!g_warned_reward_bound.exchange(true))
        std::fprintf(stderr, "[banditstream] warning: reward %.4g exceeds bound b=%.4g\n", r,
                     cfg_.b);
    }
  }
}

std::string StochasticPolicy::name() const { return to_string(cfg_.kind); }

}  // namespace banditstream
