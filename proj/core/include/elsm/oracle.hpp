#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "elsm/latency.hpp"

namespace elsm::oracle {

using content::CacheFormat;
using content::ContentCatalog;

/// One SBS's view of a single time slot: associated users with their
/// requests and link budgets, plus the deadline and storage limits the
/// decision rules need.
struct UserSlot {
  int user = 0;
  int request = 0;
  double c_sd_bps = 0.0;
  double c_su_bps = 0.0;
  double c_vd_bps = 0.0;  // backhaul budgets of the UAV owning the request
  double c_vu_bps = 0.0;
};

struct SlotSnapshot {
  int sbs_id = 0;
  std::vector<UserSlot> users;
  latency::ComputeBudget budget;
  int sbs_count = 1;
  double deadline_s = 0.02;
  double cache_capacity_bits = 300e6;

  int users_at_sbs() const { return static_cast<int>(users.size()); }
  /// U_ja: how many associated users request `content_id` this slot.
  int users_requesting(int content_id) const;

  void write(std::ostream& os) const;
  static SlotSnapshot read(std::istream& is);
};

/// Per-user transmission format for cache-miss requests.
using FormatDecision = std::map<int, CacheFormat>;

/// Contents to store with their formats, plus the storage feasibility and
/// the incremental-success objective the plan achieves.
struct CachePlan {
  std::map<int, CacheFormat> entries;
  bool feasible = true;
  int objective = 0;        // sum of per-content cached-vs-not success gains
  double total_cost_bits = 0.0;
};

/// Builds the delivery plan a (snapshot, cache plan, format choice) implies
/// for one user; shared by the closed-form rules, the brute-force searches,
/// and the simulation harness so all routes cost delays identically.
latency::DeliveryPlan make_delivery_plan(const SlotSnapshot& snapshot,
                                         const UserSlot& slot,
                                         const std::map<int, CacheFormat>& cache_entries,
                                         CacheFormat transmit_format);

struct SuccessCount {
  int hit = 0;
  int miss = 0;
  int total() const { return hit + miss; }
};

/// Number of users whose total processing + transmission delay meets the
/// deadline, split into the cached and non-cached sums.
SuccessCount count_successes(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                             const CachePlan& cache_plan,
                             const FormatDecision& format_decision);

/// Closed-form per-user transmission format given a fixed cache plan:
/// ship the 360 sphere when the multicast share is no bigger than a visible
/// copy, otherwise compare the extraction-vs-backhaul delay difference.
FormatDecision optimal_format(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                              const CachePlan& cache_plan);

/// Storage-constrained argmax of the per-content success gains given fixed
/// transmission formats. Exact depth-first search with pruning; ties break
/// toward cheaper storage, then lower content ids.
CachePlan optimal_cache(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                        const FormatDecision& format_decision);

/// Greedy gain-per-bit variant for large catalogs; not equivalence-tested
/// against the exhaustive search.
CachePlan greedy_cache(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                       const FormatDecision& format_decision);

/// Exhaustive 2^m search over the formats of the m missed requests.
/// Test oracle; refuses above `max_missed`.
FormatDecision brute_force_format(const SlotSnapshot& snapshot,
                                  const ContentCatalog& catalog,
                                  const CachePlan& cache_plan, int max_missed = 16);

/// Exhaustive search over every (content, format) subset satisfying the
/// storage constraint. Test oracle; refuses above `max_catalog`.
CachePlan brute_force_cache(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                            const FormatDecision& format_decision, int max_catalog = 12);

}  // namespace elsm::oracle
