#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include "elsm/content.hpp"
#include "elsm/esn.hpp"
#include "elsm/liquid.hpp"
#include "elsm/rng.hpp"

namespace elsm::agent {

using content::CacheFormat;
using content::ContentCatalog;

/// Which half of the decision space the actions carry: cache composition
/// (formats then follow the closed-form rule) or transmission formats
/// (cache contents then follow the storage argmax).
enum class ActionMode { kCachePlan, kFormatPlan };

/// One per-SBS decision: the set of candidate users this SBS claims plus
/// either a cache assignment or a per-content transmission format vector.
struct Action {
  std::vector<int> claimed_users;            // sorted global user ids
  std::map<int, CacheFormat> cache_entries;  // kCachePlan payload
  std::vector<CacheFormat> formats;          // kFormatPlan payload, by content id

  std::vector<int> encoding(ActionMode mode) const;  // canonical key for dedup
};

struct ActionSpaceLimits {
  int max_actions = 256;
  std::uint64_t seed = 0;
};

/// Deterministic, deduplicated action set for one SBS. Cache payloads are
/// pre-filtered for storage feasibility at the action's own claimed-user
/// count; the all-claim/no-cache action (and both uniform-format actions in
/// format mode) always survive subsampling.
class ActionSpace {
 public:
  /// `primary_users` (defaulting to all candidates) are the users this SBS
  /// is nearest to; curated cache bundles claim exactly that set so their
  /// storage sizing matches the association they produce.
  ActionSpace(ActionMode mode, std::vector<int> candidate_users,
              const ContentCatalog& catalog, double cache_capacity_bits,
              const ActionSpaceLimits& limits, std::vector<int> primary_users = {});

  ActionMode mode() const { return mode_; }
  int size() const { return static_cast<int>(actions_.size()); }
  const Action& at(int i) const { return actions_.at(i); }
  const std::vector<int>& candidate_users() const { return candidate_users_; }

 private:
  ActionMode mode_;
  std::vector<int> candidate_users_;
  std::vector<Action> actions_;
};

/// Total storage charge of a cache assignment at `users` associated users.
double cache_plan_cost(const std::map<int, CacheFormat>& entries, int users,
                       const ContentCatalog& catalog);

/// Evicts the most expensive entries (ties toward higher content ids)
/// until the assignment fits `capacity_bits` at `users` associated users.
void repair_cache_plan(std::map<int, CacheFormat>& entries, int users,
                       const ContentCatalog& catalog, double capacity_bits);

/// Softmax over value estimates at temperature kappa; normalized to 1.
std::vector<double> boltzmann_policy(const std::vector<double>& values, double kappa);

/// (1 - eps) on the argmax plus eps spread uniformly.
std::vector<double> epsilon_greedy_policy(const std::vector<double>& values, double eps);

int sample_index(const std::vector<double>& policy, Rng& rng);
int argmax_index(const std::vector<double>& values);

struct LearnerConfig {
  double kappa = 5.0;
  // tabular Q-learning baseline knobs
  double q_alpha = 0.1;
  double q_epsilon0 = 1.0;
  double q_epsilon_min = 0.05;
  double q_epsilon_decay = 0.995;
};

/// Common per-SBS learner loop: set a policy at the start of each period,
/// sample actions per slot, learn from realized success counts.
class Learner {
 public:
  virtual ~Learner() = default;

  /// Steps (a)-(c): estimate action values and set this period's policy
  /// (uniform on the very first period).
  virtual void begin_period(int period) = 0;
  /// Step (d): index of the policy this SBS announces to its peers.
  virtual int broadcast_index() const = 0;
  /// Steps (e)-(f): consume all SBSs' announced indices.
  virtual void receive_indices(const std::vector<int>& indices) = 0;
  virtual int select_action(Rng& rng) const = 0;
  /// Steps (h)-(i): learn from the realized success count of the action.
  virtual void learn(int action_index, double observed_reliability) = 0;
  /// Current per-action value estimates (diagnostics and policy tests).
  virtual std::vector<double> values() const = 0;

  const std::vector<double>& policy() const { return policy_; }

  virtual void save(std::ostream& os) const = 0;
  virtual void load(std::istream& is) = 0;

 protected:
  std::vector<double> policy_;
};

/// The full stack: spiking column driven by peer policy indices, echo-state
/// readout per action, Boltzmann selection.
class ElsmLearner : public Learner {
 public:
  ElsmLearner(int n_actions, int n_peers, const reservoir::LiquidConfig& liquid_config,
              reservoir::EsnConfig esn_config, const LearnerConfig& cfg,
              std::uint64_t seed);

  void begin_period(int period) override;
  int broadcast_index() const override { return broadcast_; }
  void receive_indices(const std::vector<int>& indices) override;
  int select_action(Rng& rng) const override;
  void learn(int action_index, double observed_reliability) override;
  std::vector<double> values() const override;

  const Eigen::VectorXd& trajectory() const { return trajectory_; }
  const reservoir::EsnState& esn() const { return esn_; }

  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

 private:
  reservoir::LiquidState liquid_;
  reservoir::EsnState esn_;
  Eigen::VectorXd trajectory_;  // last liquid output (zeros before any input)
  double kappa_;
  int broadcast_ = 0;
};

/// Liquid bypassed: the peer-index vector feeds the ESN directly.
class EsnLearner : public Learner {
 public:
  EsnLearner(int n_actions, int n_peers, reservoir::EsnConfig esn_config,
             const LearnerConfig& cfg, std::uint64_t seed, int input_levels);

  void begin_period(int period) override;
  int broadcast_index() const override { return broadcast_; }
  void receive_indices(const std::vector<int>& indices) override;
  int select_action(Rng& rng) const override;
  void learn(int action_index, double observed_reliability) override;
  std::vector<double> values() const override;

  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

 private:
  reservoir::EsnState esn_;
  Eigen::VectorXd input_;
  double kappa_;
  int input_levels_;
  int broadcast_ = 0;
};

/// Context-free tabular Q-learning with epsilon-greedy selection.
class QLearner : public Learner {
 public:
  QLearner(int n_actions, const LearnerConfig& cfg);

  void begin_period(int period) override;
  int broadcast_index() const override { return broadcast_; }
  void receive_indices(const std::vector<int>&) override {}
  int select_action(Rng& rng) const override;
  void learn(int action_index, double observed_reliability) override;

  std::vector<double> values() const override { return q_; }
  const std::vector<double>& q_values() const { return q_; }
  double epsilon() const { return epsilon_; }

  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

 private:
  std::vector<double> q_;
  double alpha_;
  double epsilon_;
  double epsilon_min_;
  double epsilon_decay_;
  int broadcast_ = 0;
};

/// Selection-policy comparison harness: realized-reliability expectations
/// of the optimal action under Boltzmann versus epsilon-greedy peers,
/// both by exact enumeration of the joint profile and by simulation.
struct SelectionFixture {
  std::vector<double> own_values;                 // this SBS's estimates y
  int optimal_action = 0;                         // o*
  std::vector<std::vector<double>> peer_success;  // F[a][b]: successes of a vs peer b
  std::vector<double> peer_boltzmann;             // peer policy under Boltzmann
  std::vector<double> peer_greedy;                // peer policy under epsilon-greedy
};

struct SelectionVerdict {
  double chi2_stat = 0.0;
  double chi2_pvalue = 1.0;
  bool distributions_indistinguishable = false;  // p > 0.01
  double expected_boltzmann = 0.0;  // exact E[F(o*, peer)] under Boltzmann peers
  double expected_greedy = 0.0;
  bool strict_ordering = false;     // expected_boltzmann > expected_greedy
  double mc_gap_lower95 = 0.0;      // Monte-Carlo lower confidence bound on the gap
};

SelectionVerdict theorem3_check(double kappa, double epsilon,
                                const SelectionFixture& fixture, int n_draws,
                                std::uint64_t seed);

/// Upper tail of the chi-squared distribution (regularized incomplete gamma).
double chi_squared_pvalue(double stat, int dof);

}  // namespace elsm::agent
