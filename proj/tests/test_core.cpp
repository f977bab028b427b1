#include <doctest.h>

#include <cmath>
#include <limits>

#include "banditstream/core.hpp"

using namespace banditstream;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("arm stats mean and variance") {
  ArmStats s;
  s.add(1, 0.7);
  CHECK(s.mean() == doctest::Approx(0.7));
  CHECK(s.n == 1);
  ArmStats z;
  z.add(1, 0.0);
  z.add(2, 1.0);
  CHECK(z.mean() == doctest::Approx(0.5));
  CHECK(z.variance() == doctest::Approx(0.25));
  CHECK(ArmStats{}.variance() == 0.0);
}

TEST_CASE("arm stats window keeps min(N, tau) latest rewards") {
  ArmStats s;
  s.tau = 3;
  for (int t = 1; t <= 5; ++t) s.add(t, static_cast<double>(t));
  CHECK(s.recent.size() == 3);
  CHECK(s.win_n == 3);
  CHECK(s.window_mean() == doctest::Approx(4.0));  // rewards 3, 4, 5
  s.evict(7);  // window covers t in {5, 6}; entries at t<=4 go
  CHECK(s.win_n == 1);
  CHECK(s.window_mean() == doctest::Approx(5.0));
  s.evict(100);
  CHECK(s.win_n == 0);
}

TEST_CASE("arm stats discounted aggregates match direct recomputation") {
  const double gamma = 0.9;
  ArmStats s;
  std::vector<double> rewards = {0.3, 0.8, 0.1, 0.9, 0.5};
  for (double r : rewards) {
    s.decay(gamma);
    s.add_discounted(r);
  }
  // direct: sum over s of gamma^{T-s} r_s with T the last round
  double direct_n = 0.0, direct_sum = 0.0;
  const int T = static_cast<int>(rewards.size());
  for (int i = 0; i < T; ++i) {
    direct_n += std::pow(gamma, T - 1 - i);
    direct_sum += std::pow(gamma, T - 1 - i) * rewards[static_cast<size_t>(i)];
  }
  CHECK(s.disc_n == doctest::Approx(direct_n).epsilon(1e-10));
  CHECK(s.disc_sum == doctest::Approx(direct_sum).epsilon(1e-10));
}

TEST_CASE("top_k ordering, ties and infinities") {
  std::vector<std::pair<ArmId, double>> scores = {{0, 1.0}, {1, kInf}, {2, 0.5}};
  CHECK(top_k(scores, 2) == std::vector<ArmId>{0, 1});
  std::vector<std::pair<ArmId, double>> equal = {{0, 1.0}, {1, 1.0}, {2, 1.0}};
  CHECK(top_k(equal, 2) == std::vector<ArmId>{0, 1});
  CHECK(top_k(equal, 3) == std::vector<ArmId>{0, 1, 2});
  CHECK_THROWS_AS(top_k(equal, 4), NotEnoughArms);
}

TEST_CASE("observation process modes") {
  Rng rng(21);
  std::vector<ArmId> known = {0, 1, 2, 3, 4};
  ObservationProcess all{ObsMode::All, 1.0};
  CHECK(all.draw(rng, 5, known, {}) == known);

  ObservationProcess last{ObsMode::LastSelected, 0.0};
  CHECK(last.draw(rng, 5, known, {}).empty());  // O_1 is empty by convention
  CHECK(last.draw(rng, 5, known, {1, 3}) == std::vector<ArmId>{1, 3});

  ObservationProcess never{ObsMode::Bernoulli, 0.0};
  CHECK(never.draw(rng, 5, known, {2}).empty());  // p=0 is not the last-selected case

  ObservationProcess sometimes{ObsMode::Bernoulli, 0.4};
  int total = 0;
  for (int rep = 0; rep < 2000; ++rep)
    total += static_cast<int>(sometimes.draw(rng, 5, known, {}).size());
  CHECK(total / 10000.0 == doctest::Approx(0.4).epsilon(0.05));
}
