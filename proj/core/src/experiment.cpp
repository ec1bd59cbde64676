#include "elsm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <cmath>
#include <cstdlib>
#include <locale>
#include <memory>
#include <ostream>
#include <thread>

#include "elsm/oracle.hpp"
#include "elsm/rng.hpp"
#include "elsm/units.hpp"

namespace elsm::sim {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "elsm") return Algorithm::kElsm;
  if (name == "esn") return Algorithm::kEsn;
  if (name == "qlearning") return Algorithm::kQLearning;
  if (name == "elsm-random-cache") return Algorithm::kElsmRandomCache;
  if (name == "elsm-random-format") return Algorithm::kElsmRandomFormat;
  throw ConfigError("unknown algorithm: " + name);
}

std::string algorithm_to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kElsm: return "elsm";
    case Algorithm::kEsn: return "esn";
    case Algorithm::kQLearning: return "qlearning";
    case Algorithm::kElsmRandomCache: return "elsm-random-cache";
    case Algorithm::kElsmRandomFormat: return "elsm-random-format";
  }
  throw ConfigError("unknown algorithm id");
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "SBS_count" || name == "sbs_count") return SweepAxis::kSbsCount;
  if (name == "backhaul_bw") return SweepAxis::kBackhaulBandwidth;
  if (name == "cache_size") return SweepAxis::kCacheSize;
  throw ConfigError("unknown sweep axis: " + name);
}

int log_level() {
  const char* v = std::getenv("ELSM_LOG");
  return v ? std::atoi(v) : 0;
}

namespace {

using agent::Action;
using agent::ActionMode;
using content::CacheFormat;

struct SlotOutcome {
  int reward = 0;
  int n_visible = 0;
  int n_360 = 0;
  double occupancy_bits = 0.0;
};

// Uniform draw over the feasible cache assignments by rejection, falling
// back to eviction repair when the feasible set is too sparse to hit.
std::map<int, CacheFormat> random_feasible_cache(Rng& rng, int n_contents, int users,
                                                 const content::ContentCatalog& catalog,
                                                 double capacity_bits) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::map<int, CacheFormat> entries;
    for (int c = 0; c < n_contents; ++c) {
      const auto roll = rng.below(3);
      if (roll == 1) entries.emplace(c, CacheFormat::kVisible);
      if (roll == 2) entries.emplace(c, CacheFormat::kFull360);
    }
    if (agent::cache_plan_cost(entries, users, catalog) <= capacity_bits) return entries;
    if (attempt == 63) {
      agent::repair_cache_plan(entries, users, catalog, capacity_bits);
      return entries;
    }
  }
  return {};
}

}  // namespace

RunResult run_experiment(const SimConfig& cfg, std::uint64_t seed, Algorithm algorithm,
                         const FrameSink& sink) {
  cfg.validate();
  const Scenario scenario = generate_scenario(cfg, seed);
  const auto params = cfg.radio_params();
  const auto bw = cfg.bandwidths();
  const auto budget = cfg.compute_budget();
  const auto& catalog = scenario.catalog;
  const double deadline = cfg.deadline_s();
  const double capacity = cfg.cache_capacity_bits();
  const ActionMode mode = cfg.resolved_action_mode();
  const int n_users = cfg.u;
  const int n_sbs = cfg.b;

  // Geometry-derived channel constants: fading multiplies the distance
  // gains per slot; backhaul SNRs are expectation-mode and fixed.
  std::vector<std::vector<double>> dist_gain(n_users, std::vector<double>(n_sbs));
  for (int i = 0; i < n_users; ++i) {
    for (int j = 0; j < n_sbs; ++j) {
      const double d = channel::distance_3d(scenario.users[i], scenario.sbss[j]);
      dist_gain[i][j] = std::pow(d, -params.sub6_pl_exp);
    }
  }
  std::vector<std::vector<channel::BackhaulBudget>> backhaul(cfg.v);
  for (int k = 0; k < cfg.v; ++k) {
    backhaul[k].resize(n_sbs);
    for (int j = 0; j < n_sbs; ++j) {
      backhaul[k][j] = channel::backhaul_capacity_per_user(params, bw, scenario.uavs[k],
                                                           scenario.sbss[j], 1);
    }
  }

  const auto candidates = nearest_sbs_lists(scenario.users, scenario.sbss, cfg.k_nearest);
  std::vector<std::vector<int>> sbs_candidates(n_sbs);
  std::vector<std::vector<int>> sbs_primary(n_sbs);
  for (int i = 0; i < n_users; ++i) {
    for (int j : candidates[i]) sbs_candidates[j].push_back(i);
    sbs_primary[candidates[i][0]].push_back(i);
  }

  std::vector<agent::ActionSpace> spaces;
  spaces.reserve(n_sbs);
  for (int j = 0; j < n_sbs; ++j) {
    spaces.emplace_back(mode, sbs_candidates[j], catalog, capacity,
                        agent::ActionSpaceLimits{cfg.action_cap,
                                                 Rng::key(seed, 0x617370ULL, j)},
                        sbs_primary[j]);
  }

  const auto learner_cfg = cfg.learner_config();
  std::vector<std::unique_ptr<agent::Learner>> learners;
  std::vector<Rng> select_rng;
  for (int j = 0; j < n_sbs; ++j) {
    const auto agent_seed = Rng::key(seed, 0x6c726eULL, j);
    switch (algorithm) {
      case Algorithm::kElsm:
      case Algorithm::kElsmRandomCache:
      case Algorithm::kElsmRandomFormat:
        learners.push_back(std::make_unique<agent::ElsmLearner>(
            spaces[j].size(), n_sbs, cfg.liquid_config(), cfg.esn_config(), learner_cfg,
            agent_seed));
        break;
      case Algorithm::kEsn:
        learners.push_back(std::make_unique<agent::EsnLearner>(
            spaces[j].size(), n_sbs, cfg.esn_config(), learner_cfg, agent_seed,
            cfg.action_cap));
        break;
      case Algorithm::kQLearning:
        learners.push_back(std::make_unique<agent::QLearner>(spaces[j].size(), learner_cfg));
        break;
    }
    select_rng.emplace_back(Rng::key(seed, 0x73656cULL, j));
  }

  std::vector<latency::ReliabilityRecord> records(n_users);
  RunResult result;
  result.frames.reserve(static_cast<std::size_t>(cfg.horizon) * n_sbs);
  result.period_success.reserve(cfg.horizon);

  const int converged_from = cfg.horizon / 2;  // last-half window
  long long converged_successes = 0;
  long long converged_slots = 0;

  std::vector<int> indices(n_sbs, 0);
  std::vector<int> chosen_idx(n_sbs, 0);
  std::vector<SlotOutcome> last_outcome(n_sbs);
  std::vector<std::vector<int>> assoc(n_sbs);

  for (int period = 1; period <= cfg.horizon; ++period) {
    for (int j = 0; j < n_sbs; ++j) learners[j]->begin_period(period);
    for (int j = 0; j < n_sbs; ++j) indices[j] = learners[j]->broadcast_index();
    for (int j = 0; j < n_sbs; ++j) learners[j]->receive_indices(indices);

    int period_successes = 0;
    for (int s = 0; s < cfg.n_tau; ++s) {
      const int t = (period - 1) * cfg.n_tau + s;

      std::vector<Action> chosen(n_sbs);
      for (int j = 0; j < n_sbs; ++j) {
        chosen_idx[j] = learners[j]->select_action(select_rng[j]);
        chosen[j] = spaces[j].at(chosen_idx[j]);
      }

      // Ablation variants randomize one half of the decision.
      if (algorithm == Algorithm::kElsmRandomCache && mode == ActionMode::kCachePlan) {
        for (int j = 0; j < n_sbs; ++j) {
          Rng rng(Rng::key(seed, 0x7263ULL, t, j));
          chosen[j].cache_entries = random_feasible_cache(
              rng, catalog.size(), static_cast<int>(chosen[j].claimed_users.size()),
              catalog, capacity);
        }
      }
      if (algorithm == Algorithm::kElsmRandomFormat && mode == ActionMode::kFormatPlan) {
        for (int j = 0; j < n_sbs; ++j) {
          Rng rng(Rng::key(seed, 0x7266ULL, t, j));
          for (auto& f : chosen[j].formats) {
            f = rng.bernoulli(0.5) ? CacheFormat::kVisible : CacheFormat::kFull360;
          }
        }
      }

      // Joint association: nearest claiming SBS, else the nearest candidate.
      for (auto& a : assoc) a.clear();
      for (int i = 0; i < n_users; ++i) {
        int serving = -1;
        for (int j : candidates[i]) {  // nearest first
          const auto& claimed = chosen[j].claimed_users;
          if (std::binary_search(claimed.begin(), claimed.end(), i)) {
            serving = j;
            break;
          }
        }
        if (serving < 0) serving = candidates[i][0];
        assoc[serving].push_back(i);
      }

      // Per-slot fading draws, keyed so evaluation order is irrelevant.
      channel::ChannelGainModel gains(n_users, n_sbs);
      for (int i = 0; i < n_users; ++i) {
        for (int j = 0; j < n_sbs; ++j) {
          Rng rng(Rng::key(seed, 0x66616465ULL, t, i, j));
          gains.set(i, j, dist_gain[i][j] * rng.exponential());
        }
      }

      for (int j = 0; j < n_sbs; ++j) {
        SlotOutcome out;
        const int u_j = static_cast<int>(assoc[j].size());
        std::map<int, CacheFormat> entries;

        if (u_j == 0) {
          if (mode == ActionMode::kCachePlan) {
            entries = chosen[j].cache_entries;
            agent::repair_cache_plan(entries, 0, catalog, capacity);
          }
        } else {
          oracle::SlotSnapshot snap;
          snap.sbs_id = j;
          snap.sbs_count = n_sbs;
          snap.deadline_s = deadline;
          snap.cache_capacity_bits = capacity;
          snap.budget = budget;
          for (int i : assoc[j]) {
            oracle::UserSlot slot;
            slot.user = i;
            slot.request = scenario.trace.request(t, i);
            const auto access =
                channel::access_capacity(params, bw, j, i, n_sbs, n_users, gains, u_j);
            slot.c_sd_bps = access.down_bps;
            slot.c_su_bps = access.up_bps;
            const int k = catalog.info(slot.request).uav;
            slot.c_vd_bps = bw.backhaul_down_hz / u_j *
                            std::log2(1.0 + backhaul[k][j].down.avg_snr_linear);
            slot.c_vu_bps = bw.backhaul_up_hz / u_j *
                            std::log2(1.0 + backhaul[k][j].up.avg_snr_linear);
            snap.users.push_back(slot);
          }

          oracle::CachePlan plan;
          oracle::FormatDecision decision;
          if (mode == ActionMode::kCachePlan) {
            entries = chosen[j].cache_entries;
            agent::repair_cache_plan(entries, u_j, catalog, capacity);
            plan.entries = entries;
            if (algorithm == Algorithm::kElsmRandomFormat) {
              Rng rng(Rng::key(seed, 0x7266ULL, t, j));
              for (const auto& slot : snap.users) {
                if (entries.count(slot.request) == 0) {
                  decision[slot.user] = rng.bernoulli(0.5) ? CacheFormat::kVisible
                                                           : CacheFormat::kFull360;
                }
              }
            } else {
              decision = oracle::optimal_format(snap, catalog, plan);
            }
          } else {
            for (const auto& slot : snap.users) {
              decision[slot.user] = chosen[j].formats.at(slot.request);
            }
            if (algorithm == Algorithm::kElsmRandomCache) {
              Rng rng(Rng::key(seed, 0x7263ULL, t, j));
              plan.entries = random_feasible_cache(rng, catalog.size(), u_j, catalog,
                                                   capacity);
            } else {
              plan = cfg.cache_search == "exact"
                         ? oracle::optimal_cache(snap, catalog, decision)
                         : oracle::greedy_cache(snap, catalog, decision);
            }
            entries = plan.entries;
          }

          for (const auto& slot : snap.users) {
            const bool hit = entries.count(slot.request) > 0;
            const CacheFormat g = hit ? CacheFormat::kVisible : decision.at(slot.user);
            const auto dp = oracle::make_delivery_plan(snap, slot, entries, g);
            const bool ok = latency::is_successful(dp, catalog, budget, deadline);
            latency::update_reliability(records[slot.user], ok);
            out.reward += ok ? 1 : 0;
          }
          period_successes += out.reward;
        }

        // Independent storage-constraint re-check of what was actually held.
        out.occupancy_bits = agent::cache_plan_cost(entries, u_j, catalog);
        if (out.occupancy_bits > capacity + 1e-6) result.eq1_violations += 1;
        for (const auto& [id, f] : entries) {
          (f == CacheFormat::kVisible ? out.n_visible : out.n_360) += 1;
        }
        last_outcome[j] = out;
      }

      // Learning targets are the percentage of associated users served in
      // time, putting the Boltzmann temperatures on a scale where they
      // span the exploration-exploitation range.
      for (int j = 0; j < n_sbs; ++j) {
        const int u_j = static_cast<int>(assoc[j].size());
        const double observed =
            u_j > 0 ? 100.0 * last_outcome[j].reward / u_j : 0.0;
        learners[j]->learn(chosen_idx[j], observed);
      }
    }

    result.period_success.push_back(static_cast<double>(period_successes) /
                                    (static_cast<double>(n_users) * cfg.n_tau));
    if (period > converged_from) {
      converged_successes += period_successes;
      converged_slots += static_cast<long long>(cfg.n_tau);
    }

    for (int j = 0; j < n_sbs; ++j) {
      MetricsFrame frame;
      frame.iter = period;
      frame.sbs_id = j;
      double total = 0.0;
      for (int i : assoc[j]) total += records[i].reliability();
      frame.total_reliability = total;
      frame.n_visible = last_outcome[j].n_visible;
      frame.n_360 = last_outcome[j].n_360;
      frame.wall_ms = 0.0;
      frame.users_at_sbs = static_cast<int>(assoc[j].size());
      frame.cache_occupancy_bits = last_outcome[j].occupancy_bits;
      if (sink) sink(frame);
      result.frames.push_back(frame);
    }
  }

  if (log_level() >= 3) {
    for (int j = 0; j < n_sbs; ++j) {
      std::cerr << "sbs " << j << " values:";
      for (double v : learners[j]->values()) std::cerr << ' ' << v;
      std::cerr << "\n  policy:";
      for (double p : learners[j]->policy()) std::cerr << ' ' << p;
      std::cerr << '\n';
    }
  }

  result.user_reliability.resize(n_users);
  for (int i = 0; i < n_users; ++i) {
    result.user_reliability[i] = records[i].reliability();
    result.network_total += records[i].reliability();
  }
  result.converged_total =
      converged_slots == 0
          ? result.network_total
          : static_cast<double>(converged_successes) / static_cast<double>(converged_slots);
  return result;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsFrame>& frames) {
  os.imbue(std::locale::classic());
  os.precision(9);
  os << "iter,sbs_id,total_reliability,n_visible,n_360,wall_ms\n";
  for (const auto& f : frames) {
    os << f.iter << ',' << f.sbs_id << ',' << f.total_reliability << ',' << f.n_visible
       << ',' << f.n_360 << ',' << f.wall_ms << '\n';
  }
}

std::vector<std::pair<double, double>> emit_cdf(std::vector<double> reliabilities) {
  if (reliabilities.empty()) throw ConfigError("cdf of an empty sample");
  std::sort(reliabilities.begin(), reliabilities.end());
  std::vector<std::pair<double, double>> cdf;
  const double n = static_cast<double>(reliabilities.size());
  for (std::size_t i = 0; i < reliabilities.size(); ++i) {
    cdf.emplace_back(reliabilities[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

void write_cdf_csv(std::ostream& os, const std::vector<std::pair<double, double>>& cdf) {
  os.imbue(std::locale::classic());
  os.precision(9);
  os << "reliability,fraction\n";
  for (const auto& [rel, frac] : cdf) os << rel << ',' << frac << '\n';
}

std::vector<SweepRow> sweep(const SimConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values,
                            const std::vector<Algorithm>& algorithms,
                            std::uint64_t base_seed) {
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");

  struct Job {
    double value;
    Algorithm alg;
    int seed_index;
    double result = 0.0;
    long long violations = 0;
  };
  std::vector<Job> jobs;
  for (double value : values) {
    for (auto alg : algorithms) {
      for (int s = 0; s < cfg.n_seeds; ++s) jobs.push_back({value, alg, s});
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      auto& job = jobs[idx];
      SimConfig run_cfg = cfg;
      switch (axis) {
        case SweepAxis::kSbsCount: run_cfg.b = static_cast<int>(job.value); break;
        case SweepAxis::kBackhaulBandwidth: run_cfg.b_vd_ghz = job.value; break;
        case SweepAxis::kCacheSize: run_cfg.s_mbits = job.value; break;
      }
      const auto run = run_experiment(run_cfg, base_seed + job.seed_index, job.alg);
      job.result = run.converged_total;
      job.violations = run.eq1_violations;
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::vector<SweepRow> rows;
  for (double value : values) {
    for (auto alg : algorithms) {
      double sum = 0.0, sum2 = 0.0;
      long long violations = 0;
      int n = 0;
      for (const auto& job : jobs) {
        if (job.value == value && job.alg == alg) {
          sum += job.result;
          sum2 += job.result * job.result;
          violations += job.violations;
          ++n;
        }
      }
      const double mean = sum / n;
      const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
      rows.push_back({value, algorithm_to_string(alg), mean, std::sqrt(var / n), violations});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os.imbue(std::locale::classic());
  os.precision(9);
  os << "axis_value,algorithm,mean_total_reliability,stderr\n";
  for (const auto& r : rows) {
    os << r.axis_value << ',' << r.algorithm << ',' << r.mean_total_reliability << ','
       << r.stderr_mean << '\n';
  }
}

std::string gnuplot_metrics_script(const std::string& csv_name) {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'iteration'\n"
         "set ylabel 'total reliability'\n"
         "plot '" + csv_name + "' using 1:3 with lines title 'per-SBS total'\n";
}

std::string gnuplot_cdf_script(const std::string& csv_name) {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'per-user reliability'\n"
         "set ylabel 'CDF'\n"
         "plot '" + csv_name + "' using 1:2 with steps title 'users'\n";
}

std::string gnuplot_sweep_script(const std::string& csv_name) {
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'axis value'\n"
         "set ylabel 'mean total reliability'\n"
         "plot '" + csv_name + "' using 1:3:4 with yerrorlines title 'sweep'\n";
}

}  // namespace elsm::sim
