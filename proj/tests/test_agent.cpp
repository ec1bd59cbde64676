#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "elsm/agent.hpp"

using namespace elsm;
using namespace elsm::agent;
using content::CacheFormat;
using content::ContentCatalog;
using content::ContentInfo;

namespace {

ContentCatalog small_catalog(int n_contents) {
  std::vector<ContentInfo> infos(n_contents);
  for (int i = 0; i < n_contents; ++i) infos[i].uav = 0;
  return ContentCatalog(std::move(infos), 50e3);
}

reservoir::LiquidConfig tiny_liquid() {
  reservoir::LiquidConfig lc;
  lc.l1 = lc.l2 = lc.l3 = 2;
  lc.slots_per_period = 4;
  lc.input_levels = 8;
  return lc;
}

reservoir::EsnConfig tiny_esn() {
  reservoir::EsnConfig ec;
  ec.reservoir_size = 20;
  ec.learning_rate = 0.05;
  return ec;
}

}  // namespace

TEST_CASE("format-plan actions over one user and one content are the two formats") {
  auto catalog = small_catalog(1);
  ActionSpace space(ActionMode::kFormatPlan, {3}, catalog, 300e6, {256, 1});
  REQUIRE(space.size() == 2);
  std::set<CacheFormat> formats;
  for (int i = 0; i < space.size(); ++i) {
    CHECK(space.at(i).claimed_users == std::vector<int>{3});
    REQUIRE(space.at(i).formats.size() == 1);
    formats.insert(space.at(i).formats[0]);
  }
  CHECK(formats.size() == 2);
}

TEST_CASE("cache-plan actions over one user and one content are the three options") {
  auto catalog = small_catalog(1);
  ActionSpace space(ActionMode::kCachePlan, {0}, catalog, 300e6, {256, 1});
  REQUIRE(space.size() == 3);
  std::set<std::string> payloads;
  for (int i = 0; i < space.size(); ++i) {
    const auto& a = space.at(i);
    if (a.cache_entries.empty()) {
      payloads.insert("none");
    } else {
      payloads.insert(a.cache_entries.at(0) == CacheFormat::kVisible ? "vis" : "full");
    }
  }
  CHECK(payloads == std::set<std::string>{"none", "vis", "full"});
}

TEST_CASE("capped spaces stay within budget, deduplicate, and are seed-stable") {
  auto catalog = small_catalog(15);
  std::vector<int> users;
  for (int i = 0; i < 10; ++i) users.push_back(i);

  ActionSpace a(ActionMode::kCachePlan, users, catalog, 300e6, {256, 42});
  ActionSpace b(ActionMode::kCachePlan, users, catalog, 300e6, {256, 42});
  CHECK(a.size() <= 256);
  CHECK(a.size() == b.size());

  std::set<std::vector<int>> seen;
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.at(i).encoding(ActionMode::kCachePlan) ==
          b.at(i).encoding(ActionMode::kCachePlan));
    CHECK(seen.insert(a.at(i).encoding(ActionMode::kCachePlan)).second);
  }
}

TEST_CASE("every cache-plan action respects the storage constraint when built") {
  auto catalog = small_catalog(8);
  std::vector<int> users = {0, 1, 2, 3, 4, 5};
  const double capacity = 200e6;
  ActionSpace space(ActionMode::kCachePlan, users, catalog, capacity, {128, 9});
  for (int i = 0; i < space.size(); ++i) {
    const auto& a = space.at(i);
    CHECK(cache_plan_cost(a.cache_entries, static_cast<int>(a.claimed_users.size()),
                          catalog) <= capacity);
  }
}

TEST_CASE("boltzmann policy normalizes and respects temperature limits") {
  const std::vector<double> y = {1.0, 3.0, 2.0, 3.0};

  auto p = boltzmann_policy(y, 1.0);
  double sum = 0.0;
  for (double v : p) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);

  // near-uniform at huge temperature
  auto hot = boltzmann_policy(y, 1e6);
  for (double v : hot) CHECK(v == doctest::Approx(0.25).epsilon(1e-4));

  // point mass at the argmax set for tiny temperature
  auto cold = boltzmann_policy({1.0, 5.0, 2.0}, 1e-6);
  CHECK(cold[1] == doctest::Approx(1.0));
}

TEST_CASE("scaling values and temperature together leaves the policy unchanged") {
  const std::vector<double> y = {0.3, 1.7, 0.9, 2.4};
  const auto base = boltzmann_policy(y, 2.0);
  std::vector<double> scaled;
  for (double v : y) scaled.push_back(10.0 * v);
  const auto same = boltzmann_policy(scaled, 20.0);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(same[i] == doctest::Approx(base[i]).epsilon(1e-12));
  }
}

TEST_CASE("equal estimates are sampled evenly") {
  const auto p = boltzmann_policy({2.0, 2.0}, 5.0);
  Rng rng(77);
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) first += sample_index(p, rng) == 0;
  // chi-squared with 1 dof at alpha = 0.01
  const double expected = n / 2.0;
  const double chi2 = 2.0 * (first - expected) * (first - expected) / expected;
  CHECK(chi2 < 6.64);
}

TEST_CASE("epsilon-greedy spreads epsilon and exploits otherwise") {
  const auto p = epsilon_greedy_policy({1.0, 4.0, 2.0}, 0.3);
  CHECK(p[1] == doctest::Approx(0.7 + 0.1));
  CHECK(p[0] == doctest::Approx(0.1));
  CHECK(p[2] == doctest::Approx(0.1));
}

TEST_CASE("first period is uniform, later periods follow the estimates") {
  ElsmLearner learner(4, 2, tiny_liquid(), tiny_esn(), LearnerConfig{}, 5);
  learner.begin_period(1);
  for (double v : learner.policy()) CHECK(v == doctest::Approx(0.25));

  // drive a few periods rewarding action 2 only
  Rng rng(3);
  for (int period = 1; period <= 60; ++period) {
    learner.begin_period(period);
    learner.receive_indices({period % 8, (period + 1) % 8});
    for (int s = 0; s < 4; ++s) {
      const int a = learner.select_action(rng);
      learner.learn(a, a == 2 ? 80.0 : 10.0);
    }
  }
  const auto values = learner.values();
  for (int i = 0; i < 4; ++i) {
    if (i != 2) CHECK(values[2] > values[i]);
  }
  learner.begin_period(61);
  const auto& policy = learner.policy();
  for (int i = 0; i < 4; ++i) {
    if (i != 2) CHECK(policy[2] > policy[i]);
  }
}

TEST_CASE("a single-action learner tracks that action's observed reliability") {
  auto esn_cfg = tiny_esn();
  esn_cfg.learning_rate = 0.2;
  ElsmLearner learner(1, 1, tiny_liquid(), esn_cfg, LearnerConfig{}, 8);
  for (int period = 1; period <= 400; ++period) {
    learner.begin_period(period);
    learner.receive_indices({0});
    for (int s = 0; s < 4; ++s) learner.learn(0, 42.0);
  }
  CHECK(learner.values()[0] == doctest::Approx(42.0).epsilon(0.02));
}

TEST_CASE("elsm learner checkpoints resume identically") {
  ElsmLearner a(3, 2, tiny_liquid(), tiny_esn(), LearnerConfig{}, 4);
  Rng drive(9);
  for (int period = 1; period <= 5; ++period) {
    a.begin_period(period);
    a.receive_indices({period % 8, (period * 3) % 8});
    for (int s = 0; s < 4; ++s) a.learn(static_cast<int>(drive.below(3)), drive.uniform(0, 100));
  }

  std::stringstream ck;
  a.save(ck);
  ElsmLearner b(3, 2, tiny_liquid(), tiny_esn(), LearnerConfig{}, 4);
  b.load(ck);

  a.begin_period(6);
  b.begin_period(6);
  CHECK(a.broadcast_index() == b.broadcast_index());
  a.receive_indices({1, 2});
  b.receive_indices({1, 2});
  a.learn(1, 55.0);
  b.learn(1, 55.0);
  CHECK(a.values() == b.values());
}

TEST_CASE("q-learner converges to a single action's mean and freezes at zero rate") {
  LearnerConfig cfg;
  cfg.q_alpha = 0.2;
  QLearner q(1, cfg);
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) q.learn(0, rng.bernoulli(0.6) ? 100.0 : 0.0);
  CHECK(q.q_values()[0] == doctest::Approx(60.0).epsilon(0.15));

  LearnerConfig frozen_cfg;
  frozen_cfg.q_alpha = 0.0;
  QLearner frozen(3, frozen_cfg);
  const auto before = frozen.q_values();
  for (int i = 0; i < 50; ++i) frozen.learn(i % 3, 100.0);
  CHECK(frozen.q_values() == before);
}

TEST_CASE("q-learner picks the known best arm after decay") {
  LearnerConfig cfg;
  QLearner q(2, cfg);
  Rng rng(6);
  // two-armed bandit: arm 1 pays more
  for (int period = 1; period <= 600; ++period) {
    q.begin_period(period);
    for (int s = 0; s < 4; ++s) {
      const int a = q.select_action(rng);
      q.learn(a, a == 1 ? (rng.bernoulli(0.8) ? 100.0 : 0.0)
                        : (rng.bernoulli(0.3) ? 100.0 : 0.0));
    }
  }
  int best = 0;
  const int n = 10000;
  q.begin_period(601);
  for (int i = 0; i < n; ++i) best += q.select_action(rng) == 1;
  CHECK(best > 0.9 * n);
}

TEST_CASE("selection-policy cases match the closed-form expectations") {
  SelectionFixture fx;
  fx.own_values = {1.0, 2.0, 3.0, 2.5};
  fx.optimal_action = 2;
  fx.peer_success = {
      {1.0, 0.5, 0.2},
      {1.5, 1.0, 0.4},
      {3.0, 2.0, 0.8},
      {2.0, 1.5, 0.6},
  };
  fx.peer_boltzmann = {0.8, 0.15, 0.05};
  fx.peer_greedy = {0.6, 0.2, 0.2};

  // case i: kappa -> infinity with epsilon = 1 gives matching uniforms
  auto ci = theorem3_check(1e6, 1.0, fx, 100000, 1);
  CHECK(ci.distributions_indistinguishable);

  // case ii: kappa -> 0 with epsilon = 0 gives matching point masses
  auto cii = theorem3_check(1e-6, 0.0, fx, 100000, 2);
  CHECK(cii.distributions_indistinguishable);

  // case iii: more weight on the peers' optimal play means strictly higher
  // expected reliability of the optimal action
  const double exact_b = 3.0 * 0.8 + 2.0 * 0.15 + 0.8 * 0.05;
  const double exact_g = 3.0 * 0.6 + 2.0 * 0.2 + 0.8 * 0.2;
  CHECK(ci.expected_boltzmann == doctest::Approx(exact_b).epsilon(1e-12));
  CHECK(ci.expected_greedy == doctest::Approx(exact_g).epsilon(1e-12));
  CHECK(ci.strict_ordering);
  CHECK(ci.mc_gap_lower95 > 0.0);

  // mismatched kappa/epsilon pairs are detectably different
  auto diff = theorem3_check(1e-6, 1.0, fx, 100000, 3);
  CHECK_FALSE(diff.distributions_indistinguishable);
}

TEST_CASE("chi-squared tail behaves at the reference points") {
  CHECK(chi_squared_pvalue(0.0, 3) == doctest::Approx(1.0));
  CHECK(chi_squared_pvalue(6.63, 1) == doctest::Approx(0.01).epsilon(0.01));
  CHECK(chi_squared_pvalue(100.0, 1) < 1e-10);
}
