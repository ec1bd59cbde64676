#include "elsm/agent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

namespace elsm::agent {

std::vector<int> Action::encoding(ActionMode mode) const {
  std::vector<int> enc;
  enc.push_back(static_cast<int>(mode));
  enc.push_back(static_cast<int>(claimed_users.size()));
  enc.insert(enc.end(), claimed_users.begin(), claimed_users.end());
  if (mode == ActionMode::kCachePlan) {
    for (const auto& [id, f] : cache_entries) {
      enc.push_back(id);
      enc.push_back(static_cast<int>(f) + 1);
    }
  } else {
    for (auto f : formats) enc.push_back(static_cast<int>(f));
  }
  return enc;
}

double cache_plan_cost(const std::map<int, CacheFormat>& entries, int users,
                       const ContentCatalog& catalog) {
  double total = 0.0;
  for (const auto& [id, f] : entries) {
    total += f == CacheFormat::kFull360 ? catalog.info(id).size_360_bits
                                        : users * catalog.info(id).size_visible_bits;
  }
  return total;
}

void repair_cache_plan(std::map<int, CacheFormat>& entries, int users,
                       const ContentCatalog& catalog, double capacity_bits) {
  while (!entries.empty() && cache_plan_cost(entries, users, catalog) > capacity_bits) {
    auto worst = entries.begin();
    double worst_cost = -1.0;
    for (auto it = entries.begin(); it != entries.end(); ++it) {
      const double c = it->second == CacheFormat::kFull360
                           ? catalog.info(it->first).size_360_bits
                           : users * catalog.info(it->first).size_visible_bits;
      if (c >= worst_cost) {
        worst_cost = c;
        worst = it;
      }
    }
    entries.erase(worst);
  }
}

ActionSpace::ActionSpace(ActionMode mode, std::vector<int> candidate_users,
                         const ContentCatalog& catalog, double cache_capacity_bits,
                         const ActionSpaceLimits& limits,
                         std::vector<int> primary_users)
    : mode_(mode), candidate_users_(std::move(candidate_users)) {
  if (limits.max_actions < 1) throw ConfigError("action cap must be positive");
  if (catalog.size() == 0) throw ConfigError("action space needs a catalog");
  std::sort(candidate_users_.begin(), candidate_users_.end());
  if (primary_users.empty()) primary_users = candidate_users_;
  std::sort(primary_users.begin(), primary_users.end());

  const int n_cand = static_cast<int>(candidate_users_.size());
  const int n_contents = catalog.size();
  Rng rng(Rng::key(limits.seed, 0x616374ULL));

  std::set<std::vector<int>> seen;
  auto push = [&](Action a) {
    std::sort(a.claimed_users.begin(), a.claimed_users.end());
    if (mode_ == ActionMode::kCachePlan) {
      repair_cache_plan(a.cache_entries, static_cast<int>(a.claimed_users.size()), catalog,
                   cache_capacity_bits);
    }
    if (seen.insert(a.encoding(mode_)).second) actions_.push_back(std::move(a));
  };

  // Always-kept specials: claim everything with an empty cache (all-miss),
  // and in format mode the two uniform format vectors.
  Action all_claim;
  all_claim.claimed_users = candidate_users_;
  if (mode_ == ActionMode::kFormatPlan) {
    Action vis = all_claim, full = all_claim;
    vis.formats.assign(n_contents, CacheFormat::kVisible);
    full.formats.assign(n_contents, CacheFormat::kFull360);
    push(vis);
    push(full);
  } else {
    push(all_claim);
  }
  const int n_specials = static_cast<int>(actions_.size());

  auto random_claim = [&] {
    std::vector<int> claimed;
    for (int u : candidate_users_) {
      if (rng.bernoulli(0.5)) claimed.push_back(u);
    }
    if (claimed.empty() && n_cand > 0) {
      claimed.push_back(candidate_users_[rng.below(n_cand)]);
    }
    return claimed;
  };

  // Exhaustive walk of the claim-all payloads when they fit the cap,
  // then seed-deterministic uniform filling over the joint space.
  if (mode_ == ActionMode::kFormatPlan) {
    if (n_contents <= 20 && (1 << n_contents) <= limits.max_actions) {
      for (std::uint64_t mask = 0; mask < (1ULL << n_contents); ++mask) {
        Action a = all_claim;
        a.formats.assign(n_contents, CacheFormat::kVisible);
        for (int c = 0; c < n_contents; ++c) {
          if ((mask >> c) & 1) a.formats[c] = CacheFormat::kFull360;
        }
        push(a);
      }
    }
  } else {
    double full_space = 1.0;
    for (int c = 0; c < n_contents && full_space <= limits.max_actions; ++c) {
      full_space *= 3.0;
    }
    if (full_space <= limits.max_actions) {
      std::vector<int> trits(n_contents, 0);
      while (true) {
        Action a = all_claim;
        for (int c = 0; c < n_contents; ++c) {
          if (trits[c] == 1) a.cache_entries.emplace(c, CacheFormat::kVisible);
          if (trits[c] == 2) a.cache_entries.emplace(c, CacheFormat::kFull360);
        }
        if (cache_plan_cost(a.cache_entries, n_cand, catalog) <= cache_capacity_bits) {
          push(a);
        }
        int pos = 0;
        while (pos < n_contents && ++trits[pos] == 3) trits[pos++] = 0;
        if (pos == n_contents) break;
      }
    }
  }

  // Curated coverage: contiguous content bundles (contents of one UAV sit
  // at adjacent ids) cached from each starting offset and claimed by the
  // users this SBS is nearest to. Gives every popularity profile at least
  // one well-aimed plan.
  if (mode_ == ActionMode::kCachePlan && n_contents > 1) {
    const int fill_users = std::max<int>(1, static_cast<int>(primary_users.size()));
    for (int start = 0; start < n_contents; ++start) {
      for (const auto fmt : {CacheFormat::kVisible, CacheFormat::kFull360}) {
        Action a;
        a.claimed_users = primary_users;
        double cost = 0.0;
        for (int off = 0; off < n_contents; ++off) {
          const int c = (start + off) % n_contents;
          const double item = fmt == CacheFormat::kFull360
                                  ? catalog.info(c).size_360_bits
                                  : fill_users * catalog.info(c).size_visible_bits;
          if (cost + item > cache_capacity_bits) break;
          cost += item;
          a.cache_entries.emplace(c, fmt);
        }
        push(a);
        // the same bundle under a claim-everything association
        Action wide = a;
        wide.claimed_users = candidate_users_;
        push(wide);
      }
    }
  }

  // Fill the remaining budget with sampled (claim, payload) pairs. Claim
  // variety only exists with more than one candidate user.
  const int budget = limits.max_actions;
  int attempts = 0;
  const int max_attempts = budget * 50;
  while (static_cast<int>(actions_.size()) < budget && attempts++ < max_attempts) {
    Action a;
    a.claimed_users = n_cand > 1 ? random_claim() : candidate_users_;
    if (mode_ == ActionMode::kFormatPlan) {
      a.formats.resize(n_contents);
      for (auto& f : a.formats) {
        f = rng.bernoulli(0.5) ? CacheFormat::kVisible : CacheFormat::kFull360;
      }
    } else {
      for (int c = 0; c < n_contents; ++c) {
        const auto roll = rng.below(3);
        if (roll == 1) a.cache_entries.emplace(c, CacheFormat::kVisible);
        if (roll == 2) a.cache_entries.emplace(c, CacheFormat::kFull360);
      }
    }
    push(a);
  }

  // Over-full exhaustive stage: subsample uniformly, keeping the specials.
  if (static_cast<int>(actions_.size()) > budget) {
    std::vector<Action> kept(actions_.begin(), actions_.begin() + n_specials);
    std::vector<Action> pool(actions_.begin() + n_specials, actions_.end());
    for (int i = static_cast<int>(pool.size()) - 1; i > 0; --i) {
      std::swap(pool[i], pool[rng.below(i + 1)]);
    }
    const int room = budget - n_specials;
    kept.insert(kept.end(), pool.begin(), pool.begin() + std::min<int>(room, pool.size()));
    actions_ = std::move(kept);
  }

  if (actions_.empty()) throw ConfigError("empty feasible action set");
}

std::vector<double> boltzmann_policy(const std::vector<double>& values, double kappa) {
  if (values.empty()) throw ConfigError("policy over an empty action set");
  if (!(kappa > 0)) throw ConfigError("temperature must be positive");
  const double vmax = *std::max_element(values.begin(), values.end());
  std::vector<double> p(values.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp((values[i] - vmax) / kappa);
    norm += p[i];
  }
  for (auto& v : p) v /= norm;
  return p;
}

std::vector<double> epsilon_greedy_policy(const std::vector<double>& values, double eps) {
  if (values.empty()) throw ConfigError("policy over an empty action set");
  if (eps < 0 || eps > 1) throw ConfigError("epsilon must lie in [0,1]");
  const int n = static_cast<int>(values.size());
  std::vector<double> p(n, eps / n);
  p[argmax_index(values)] += 1.0 - eps;
  return p;
}

int sample_index(const std::vector<double>& policy, Rng& rng) {
  const double x = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    acc += policy[i];
    if (x < acc) return static_cast<int>(i);
  }
  return static_cast<int>(policy.size()) - 1;
}

int argmax_index(const std::vector<double>& values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) -
                          values.begin());
}

ElsmLearner::ElsmLearner(int n_actions, int n_peers,
                         const reservoir::LiquidConfig& liquid_config,
                         reservoir::EsnConfig esn_config, const LearnerConfig& cfg,
                         std::uint64_t seed)
    : liquid_(liquid_config, n_peers, seed), kappa_(cfg.kappa) {
  esn_config.input_dim = liquid_.output_dim();
  esn_config.output_dim = n_actions;
  esn_ = reservoir::build_esn(esn_config, seed);
  trajectory_ = Eigen::VectorXd::Zero(liquid_.output_dim());
  policy_.assign(n_actions, 1.0 / n_actions);
}

void ElsmLearner::begin_period(int period) {
  const int n = esn_.config.output_dim;
  if (period <= 1) {
    policy_.assign(n, 1.0 / n);
  } else {
    const Eigen::VectorXd y = reservoir::predict(esn_, trajectory_);
    policy_ = boltzmann_policy(std::vector<double>(y.data(), y.data() + y.size()), kappa_);
  }
  broadcast_ = argmax_index(policy_);
}

void ElsmLearner::receive_indices(const std::vector<int>& indices) {
  const auto traj = liquid_.step_period(indices);
  trajectory_ = Eigen::Map<const Eigen::VectorXd>(traj.data(), traj.size());
}

int ElsmLearner::select_action(Rng& rng) const { return sample_index(policy_, rng); }

void ElsmLearner::learn(int action_index, double observed_reliability) {
  reservoir::update_reservoir(esn_, trajectory_);
  const double y = reservoir::predict_one(esn_, action_index, trajectory_);
  reservoir::train_step(esn_, action_index, observed_reliability, y);
}

std::vector<double> ElsmLearner::values() const {
  const Eigen::VectorXd y = reservoir::predict(esn_, trajectory_);
  return std::vector<double>(y.data(), y.data() + y.size());
}

void ElsmLearner::save(std::ostream& os) const {
  liquid_.save(os);
  esn_.save(os);
  os << broadcast_ << ' ' << trajectory_.size() << '\n';
  os.precision(17);
  for (int i = 0; i < trajectory_.size(); ++i) os << trajectory_(i) << ' ';
  os << '\n';
  for (double p : policy_) os << p << ' ';
  os << '\n';
}

void ElsmLearner::load(std::istream& is) {
  liquid_.load(is);
  esn_.load(is);
  long long n = 0;
  is >> broadcast_ >> n;
  if (n != trajectory_.size()) throw ConfigError("learner checkpoint shape mismatch");
  for (int i = 0; i < trajectory_.size(); ++i) is >> trajectory_(i);
  for (auto& p : policy_) is >> p;
  if (!is) throw ConfigError("truncated learner checkpoint");
}

EsnLearner::EsnLearner(int n_actions, int n_peers, reservoir::EsnConfig esn_config,
                       const LearnerConfig& cfg, std::uint64_t seed, int input_levels)
    : kappa_(cfg.kappa), input_levels_(input_levels) {
  esn_config.input_dim = n_peers;
  esn_config.output_dim = n_actions;
  esn_ = reservoir::build_esn(esn_config, seed);
  input_ = Eigen::VectorXd::Zero(n_peers);
  policy_.assign(n_actions, 1.0 / n_actions);
}

void EsnLearner::begin_period(int period) {
  const int n = esn_.config.output_dim;
  if (period <= 1) {
    policy_.assign(n, 1.0 / n);
  } else {
    const Eigen::VectorXd y = reservoir::predict(esn_, input_);
    policy_ = boltzmann_policy(std::vector<double>(y.data(), y.data() + y.size()), kappa_);
  }
  broadcast_ = argmax_index(policy_);
}

void EsnLearner::receive_indices(const std::vector<int>& indices) {
  if (static_cast<int>(indices.size()) != input_.size()) {
    throw ConfigError("peer index dimension mismatch");
  }
  // Encoded indices are scaled up so the few raw inputs drive the
  // reservoir with energy comparable to a full liquid trajectory.
  const double gain = 10.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    input_(static_cast<int>(i)) = gain * (indices[i] + 1.0) / input_levels_;
  }
}

int EsnLearner::select_action(Rng& rng) const { return sample_index(policy_, rng); }

void EsnLearner::learn(int action_index, double observed_reliability) {
  reservoir::update_reservoir(esn_, input_);
  const double y = reservoir::predict_one(esn_, action_index, input_);
  reservoir::train_step(esn_, action_index, observed_reliability, y);
}

std::vector<double> EsnLearner::values() const {
  const Eigen::VectorXd y = reservoir::predict(esn_, input_);
  return std::vector<double>(y.data(), y.data() + y.size());
}

void EsnLearner::save(std::ostream& os) const {
  esn_.save(os);
  os.precision(17);
  os << broadcast_ << '\n';
  for (int i = 0; i < input_.size(); ++i) os << input_(i) << ' ';
  os << '\n';
  for (double p : policy_) os << p << ' ';
  os << '\n';
}

void EsnLearner::load(std::istream& is) {
  esn_.load(is);
  is >> broadcast_;
  for (int i = 0; i < input_.size(); ++i) is >> input_(i);
  for (auto& p : policy_) is >> p;
  if (!is) throw ConfigError("truncated learner checkpoint");
}

QLearner::QLearner(int n_actions, const LearnerConfig& cfg)
    : q_(n_actions, 0.0),
      alpha_(cfg.q_alpha),
      epsilon_(cfg.q_epsilon0),
      epsilon_min_(cfg.q_epsilon_min),
      epsilon_decay_(cfg.q_epsilon_decay) {
  policy_.assign(n_actions, 1.0 / n_actions);
}

void QLearner::begin_period(int period) {
  if (period <= 1) {
    policy_.assign(q_.size(), 1.0 / q_.size());
  } else {
    policy_ = epsilon_greedy_policy(q_, epsilon_);
    epsilon_ = std::max(epsilon_min_, epsilon_ * epsilon_decay_);
  }
  broadcast_ = argmax_index(q_);
}

int QLearner::select_action(Rng& rng) const { return sample_index(policy_, rng); }

void QLearner::learn(int action_index, double observed_reliability) {
  q_[action_index] += alpha_ * (observed_reliability - q_[action_index]);
}

void QLearner::save(std::ostream& os) const {
  os.precision(17);
  os << q_.size() << ' ' << epsilon_ << ' ' << broadcast_ << '\n';
  for (double q : q_) os << q << ' ';
  os << '\n';
  for (double p : policy_) os << p << ' ';
  os << '\n';
}

void QLearner::load(std::istream& is) {
  std::size_t n = 0;
  is >> n >> epsilon_ >> broadcast_;
  if (n != q_.size()) throw ConfigError("Q-table checkpoint shape mismatch");
  for (auto& q : q_) is >> q;
  for (auto& p : policy_) is >> p;
  if (!is) throw ConfigError("truncated Q-learner checkpoint");
}

namespace {

// Regularized incomplete gamma Q(a, x) by series / continued fraction.
double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("gamma_q domain");
  if (x == 0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace

double chi_squared_pvalue(double stat, int dof) {
  if (dof < 1) return 1.0;
  return gamma_q(dof / 2.0, stat / 2.0);
}

SelectionVerdict theorem3_check(double kappa, double epsilon,
                                const SelectionFixture& fixture, int n_draws,
                                std::uint64_t seed) {
  const auto boltz = boltzmann_policy(fixture.own_values, kappa);
  const auto greedy = epsilon_greedy_policy(fixture.own_values, epsilon);
  const int k = static_cast<int>(boltz.size());

  SelectionVerdict v;

  // Homogeneity test between the two empirical selection distributions.
  Rng rng(Rng::key(seed, 0x74683343ULL));
  std::vector<long long> nb(k, 0), ng(k, 0);
  for (int i = 0; i < n_draws; ++i) nb[sample_index(boltz, rng)]++;
  for (int i = 0; i < n_draws; ++i) ng[sample_index(greedy, rng)]++;
  double stat = 0.0;
  int dof = -1;
  for (int i = 0; i < k; ++i) {
    const double pooled = (nb[i] + ng[i]) / 2.0;
    if (pooled <= 0) continue;
    stat += (nb[i] - pooled) * (nb[i] - pooled) / pooled;
    stat += (ng[i] - pooled) * (ng[i] - pooled) / pooled;
    ++dof;
  }
  v.chi2_stat = stat;
  v.chi2_pvalue = dof >= 1 ? chi_squared_pvalue(stat, dof) : 1.0;
  v.distributions_indistinguishable = v.chi2_pvalue > 0.01;

  // Exact expected reliability of the optimal action under the two peer
  // behaviours (enumerating the peer's finite action set).
  const auto& row = fixture.peer_success.at(fixture.optimal_action);
  if (row.size() != fixture.peer_boltzmann.size() ||
      row.size() != fixture.peer_greedy.size()) {
    throw ConfigError("selection fixture dimensions disagree");
  }
  for (std::size_t b = 0; b < row.size(); ++b) {
    v.expected_boltzmann += row[b] * fixture.peer_boltzmann[b];
    v.expected_greedy += row[b] * fixture.peer_greedy[b];
  }
  v.strict_ordering = v.expected_boltzmann > v.expected_greedy;

  // Monte-Carlo cross-check of the same gap.
  double sum_b = 0, sum2_b = 0, sum_g = 0, sum2_g = 0;
  for (int i = 0; i < n_draws; ++i) {
    const double fb = row[sample_index(fixture.peer_boltzmann, rng)];
    const double fg = row[sample_index(fixture.peer_greedy, rng)];
    sum_b += fb;
    sum2_b += fb * fb;
    sum_g += fg;
    sum2_g += fg * fg;
  }
  const double mb = sum_b / n_draws, mg = sum_g / n_draws;
  const double var_b = sum2_b / n_draws - mb * mb;
  const double var_g = sum2_g / n_draws - mg * mg;
  const double se = std::sqrt((var_b + var_g) / n_draws);
  v.mc_gap_lower95 = (mb - mg) - 1.6448536269514722 * se;
  return v;
}

}  // namespace elsm::agent
