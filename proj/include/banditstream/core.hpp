#pragma once

#include <Eigen/Dense>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "banditstream/errors.hpp"
#include "banditstream/numerics.hpp"

namespace banditstream {

using ArmId = int;

// Per-arm sufficient statistics: plain counts/sums, a bounded window of the
// latest rewards, and gamma-discounted aggregates.
struct ArmStats {
  long long n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  int tau = 0;  // window length; 0 disables window tracking
  std::deque<std::pair<int, double>> recent;
  long long win_n = 0;
  double win_sum = 0.0;

  double disc_n = 0.0;
  double disc_sum = 0.0;

  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  // Biased estimator sum_sq/n - mean^2, clamped at zero.
  double variance() const;

  void add(int t, double reward);
  void decay(double gamma);
  void add_discounted(double reward);
  // Drops window entries older than t - tau.
  void evict(int t);
  double window_mean() const { return win_n > 0 ? win_sum / static_cast<double>(win_n) : 0.0; }
};

enum class ObsMode { All, Bernoulli, LastSelected };

struct ObservationProcess {
  ObsMode mode = ObsMode::All;
  double p = 1.0;

  // O_t given the known arms and last round's selection. Bernoulli consumes
  // one draw per arm id in [0, num_arms) so the stream is stable across
  // policies; LastSelected returns the previous selection (empty at t=1).
  std::vector<ArmId> draw(Rng& rng, int num_arms, const std::vector<ArmId>& known,
                          const std::vector<ArmId>& prev_selected) const;
};

ObsMode obs_mode_from_string(const std::string& name);
std::string to_string(ObsMode mode);

struct RoundLog {
  int t = 0;
  std::vector<ArmId> selected;             // ascending, |selected| = k
  std::vector<double> rewards;             // aligned with selected
  std::vector<ArmId> observed;             // O_t, ascending
  std::vector<Eigen::VectorXd> contexts;   // aligned with observed (may be empty)
  std::vector<double> full_rewards;        // all arms; only for full-information policies
};

struct Trajectory {
  std::vector<RoundLog> rounds;
  std::vector<double> oracle_values;  // per-round best-k expected value
};

struct Observation {
  std::vector<ArmId> arms;                // O_t, ascending
  std::vector<Eigen::VectorXd> contexts;  // aligned with arms; empty if none
};

// The k largest by score; ties broken by ascending ArmId; +inf sorts above
// any finite score. Returns ascending arm ids.
std::vector<ArmId> top_k(const std::vector<std::pair<ArmId, double>>& scores, int k);

class Policy {
 public:
  virtual ~Policy() = default;

  virtual void reset(int num_arms, int k, Rng rng) = 0;
  virtual std::vector<ArmId> select(int t, const std::vector<ArmId>& known,
                                    const Observation& obs) = 0;
  virtual void update(const RoundLog& round) = 0;
  virtual std::string name() const = 0;
  // Full-information policies consume the complete reward vector each round
  // when the environment can provide it.
  virtual bool wants_full_rewards() const { return false; }

 protected:
  // Guard for the strictly-increasing round contract.
  void check_round_order(int t);

 private:
  int last_update_t_ = 0;
};

struct StepResult {
  std::vector<double> rewards;  // aligned with selected
  std::vector<double> truth;    // expected (or realized, for traces) value per selected arm
  double oracle_value = 0.0;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual void reset(Rng rng) = 0;
  virtual int num_arms() const = 0;
  virtual int context_dim() const { return 0; }
  // O_t and (for contextual environments) the revealed contexts.
  virtual Observation observe(int t, const std::vector<ArmId>& prev_selected) = 0;
  virtual StepResult step(int t, const std::vector<ArmId>& selected) = 0;
  // Best-k set under the environment's ground truth at t.
  virtual std::vector<ArmId> oracle_set(int t, int k) = 0;
  // Arms that become known at round t. Defaults to every arm at t=1.
  virtual std::vector<ArmId> newly_known(int t);
  virtual bool has_full_rewards() const { return false; }
  virtual std::vector<double> full_rewards(int /*t*/) const { return {}; }
  virtual nlohmann::json manifest(bool dump_truth) const = 0;
  virtual std::string name() const = 0;
};

}  // namespace banditstream
