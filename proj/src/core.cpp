#include "banditstream/core.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace banditstream {

double ArmStats::variance() const {
  if (n <= 0) return 0.0;
  const double m = mean();
  return std::max(0.0, sum_sq / static_cast<double>(n) - m * m);
}

void ArmStats::add(int t, double reward) {
  n += 1;
  sum += reward;
  sum_sq += reward * reward;
  if (tau > 0) {
    recent.emplace_back(t, reward);
    win_n += 1;
    win_sum += reward;
    if (static_cast<int>(recent.size()) > tau) {
      win_n -= 1;
      win_sum -= recent.front().second;
      recent.pop_front();
    }
  }
}

void ArmStats::decay(double gamma) {
  disc_n *= gamma;
  disc_sum *= gamma;
}

void ArmStats::add_discounted(double reward) {
  disc_n += 1.0;
  disc_sum += reward;
}

void ArmStats::evict(int t) {
  if (tau <= 0) return;
  while (!recent.empty() && recent.front().first <= t - tau) {
    win_n -= 1;
    win_sum -= recent.front().second;
    recent.pop_front();
  }
}

std::vector<ArmId> ObservationProcess::draw(Rng& rng, int num_arms,
                                            const std::vector<ArmId>& known,
                                            const std::vector<ArmId>& prev_selected) const {
  switch (mode) {
    case ObsMode::All:
      return known;
    case ObsMode::Bernoulli: {
      std::vector<char> hit(static_cast<size_t>(num_arms), 0);
      for (int i = 0; i < num_arms; ++i) hit[static_cast<size_t>(i)] = rng.uniform() < p;
      std::vector<ArmId> out;
      for (ArmId i : known)
        if (hit[static_cast<size_t>(i)]) out.push_back(i);
      return out;
    }
    case ObsMode::LastSelected:
      return prev_selected;
  }
  return {};
}

ObsMode obs_mode_from_string(const std::string& name) {
  if (name == "all") return ObsMode::All;
  if (name == "bernoulli") return ObsMode::Bernoulli;
  if (name == "last_selected") return ObsMode::LastSelected;
  throw ConfigError("unknown observation mode: " + name);
}

std::string to_string(ObsMode mode) {
  switch (mode) {
    case ObsMode::All:
      return "all";
    case ObsMode::Bernoulli:
      return "bernoulli";
    case ObsMode::LastSelected:
      return "last_selected";
  }
  return "?";
}

std::vector<ArmId> top_k(const std::vector<std::pair<ArmId, double>>& scores, int k) {
  if (k < 0 || static_cast<int>(scores.size()) < k)
    throw NotEnoughArms("top_k: fewer scored arms than k");
  std::vector<std::pair<ArmId, double>> order(scores);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<ArmId> out;
  out.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(order[static_cast<size_t>(i)].first);
  std::sort(out.begin(), out.end());
  return out;
}

void Policy::check_round_order(int t) {
  if (t <= last_update_t_)
    throw OutOfOrderRound("policy update: round index must be strictly increasing");
  last_update_t_ = t;
}

std::vector<ArmId> Environment::newly_known(int t) {
  std::vector<ArmId> out;
  if (t == 1) {
    out.resize(static_cast<size_t>(num_arms()));
    for (int i = 0; i < num_arms(); ++i) out[static_cast<size_t>(i)] = i;
  }
  return out;
}

}  // namespace banditstream
