#include "elsm/oracle.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace elsm::oracle {

int SlotSnapshot::users_requesting(int content_id) const {
  int n = 0;
  for (const auto& u : users) {
    if (u.request == content_id) ++n;
  }
  return n;
}

void SlotSnapshot::write(std::ostream& os) const {
  os.precision(17);
  os << "sbs " << sbs_id << " count " << sbs_count << " deadline " << deadline_s
     << " capacity " << cache_capacity_bits << '\n';
  os << "budget " << budget.uav_bps << ' ' << budget.sbs_bps << ' '
     << (budget.uav_shared_across_sbs ? 1 : 0) << '\n';
  for (const auto& u : users) {
    os << "user " << u.user << ' ' << u.request << ' ' << u.c_sd_bps << ' '
       << u.c_su_bps << ' ' << u.c_vd_bps << ' ' << u.c_vu_bps << '\n';
  }
}

SlotSnapshot SlotSnapshot::read(std::istream& is) {
  SlotSnapshot snap;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "sbs") {
      std::string k1, k2, k3;
      if (!(ls >> snap.sbs_id >> k1 >> snap.sbs_count >> k2 >> snap.deadline_s >>
            k3 >> snap.cache_capacity_bits)) {
        throw ConfigError("malformed snapshot header");
      }
      header_seen = true;
    } else if (tag == "budget") {
      int shared = 1;
      if (!(ls >> snap.budget.uav_bps >> snap.budget.sbs_bps >> shared)) {
        throw ConfigError("malformed snapshot budget");
      }
      snap.budget.uav_shared_across_sbs = shared != 0;
    } else if (tag == "user") {
      UserSlot u;
      if (!(ls >> u.user >> u.request >> u.c_sd_bps >> u.c_su_bps >> u.c_vd_bps >>
            u.c_vu_bps)) {
        throw ConfigError("malformed snapshot user line");
      }
      snap.users.push_back(u);
    } else {
      throw ConfigError("unknown snapshot tag: " + tag);
    }
  }
  if (!header_seen) throw ConfigError("snapshot missing header line");
  return snap;
}

latency::DeliveryPlan make_delivery_plan(const SlotSnapshot& snapshot,
                                         const UserSlot& slot,
                                         const std::map<int, CacheFormat>& cache_entries,
                                         CacheFormat transmit_format) {
  latency::DeliveryPlan plan;
  plan.user = slot.user;
  plan.content = slot.request;
  plan.sbs = snapshot.sbs_id;
  plan.c_vd_bps = slot.c_vd_bps;
  plan.c_vu_bps = slot.c_vu_bps;
  plan.c_sd_bps = slot.c_sd_bps;
  plan.c_su_bps = slot.c_su_bps;
  plan.users_at_sbs = snapshot.users_at_sbs();
  plan.users_requesting = snapshot.users_requesting(slot.request);
  plan.sbs_count = snapshot.sbs_count;

  auto it = cache_entries.find(slot.request);
  if (it != cache_entries.end()) {
    plan.cache_hit = true;
    plan.cached_format = it->second;
  } else {
    plan.cache_hit = false;
    plan.transmit_format = transmit_format;
  }
  return plan;
}

namespace {

CacheFormat format_for(const FormatDecision& decision, int user) {
  auto it = decision.find(user);
  if (it == decision.end()) {
    throw ConfigError("format decision missing for user " + std::to_string(user));
  }
  return it->second;
}

}  // namespace

SuccessCount count_successes(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                             const CachePlan& cache_plan,
                             const FormatDecision& format_decision) {
  SuccessCount out;
  for (const auto& slot : snapshot.users) {
    const bool hit = cache_plan.entries.count(slot.request) > 0;
    const CacheFormat g = hit ? CacheFormat::kVisible : format_for(format_decision, slot.user);
    const auto plan = make_delivery_plan(snapshot, slot, cache_plan.entries, g);
    const bool ok =
        latency::is_successful(plan, catalog, snapshot.budget, snapshot.deadline_s);
    if (hit) {
      out.hit += ok ? 1 : 0;
    } else {
      out.miss += ok ? 1 : 0;
    }
  }
  return out;
}

FormatDecision optimal_format(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                              const CachePlan& cache_plan) {
  FormatDecision decision;
  const auto& budget = snapshot.budget;
  const double share = budget.uav_shared_across_sbs ? snapshot.sbs_count : 1;
  const int u_j = snapshot.users_at_sbs();

  for (const auto& slot : snapshot.users) {
    if (cache_plan.entries.count(slot.request) > 0) continue;  // hit: no format needed

    const auto& info = catalog.info(slot.request);
    const int u_ja = snapshot.users_requesting(slot.request);
    if (u_ja < 1) throw std::logic_error("missed content with no requesting users");

    // Shipping the whole sphere wins outright once the multicast share is
    // no larger than one visible copy.
    if (info.size_360_bits <= u_ja * info.size_visible_bits) {
      decision[slot.user] = CacheFormat::kFull360;
      continue;
    }

    // Otherwise compare the two total delays. The compute difference is
    // H*U_j*(1/R_S - B/R_U); the backhaul difference is the size gap over
    // the backhaul rate.
    const double compute_diff =
        info.extract_workload_bits * u_j * (1.0 / budget.sbs_bps - share / budget.uav_bps);
    double backhaul_diff;
    if (slot.c_vd_bps > 0.0) {
      backhaul_diff =
          (info.size_360_bits / u_ja - info.size_visible_bits) / slot.c_vd_bps;
    } else {
      // Dead backhaul: both formats are unreachable, pick the visible branch.
      decision[slot.user] = CacheFormat::kVisible;
      continue;
    }
    decision[slot.user] = (compute_diff + backhaul_diff <= 0.0) ? CacheFormat::kFull360
                                                                : CacheFormat::kVisible;
  }
  return decision;
}

namespace {

struct CacheItem {
  int content = 0;
  CacheFormat format = CacheFormat::kVisible;
  int gain = 0;          // successes gained over leaving the content uncached
  double cost_bits = 0.0;
};

// Per-content success gains of caching in each format, relative to the
// users' miss outcomes under the fixed format decision.
std::vector<CacheItem> cache_items(const SlotSnapshot& snapshot,
                                   const ContentCatalog& catalog,
                                   const FormatDecision& format_decision) {
  std::vector<int> contents;
  for (const auto& u : snapshot.users) contents.push_back(u.request);
  std::sort(contents.begin(), contents.end());
  contents.erase(std::unique(contents.begin(), contents.end()), contents.end());

  const int u_j = snapshot.users_at_sbs();
  std::vector<CacheItem> items;
  for (int a : contents) {
    const auto& info = catalog.info(a);
    int miss_ok = 0, hit120_ok = 0, hit360_ok = 0;
    for (const auto& slot : snapshot.users) {
      if (slot.request != a) continue;
      const std::map<int, CacheFormat> none;
      auto miss_plan =
          make_delivery_plan(snapshot, slot, none, format_for(format_decision, slot.user));
      miss_ok += latency::is_successful(miss_plan, catalog, snapshot.budget,
                                        snapshot.deadline_s);

      std::map<int, CacheFormat> with120{{a, CacheFormat::kVisible}};
      auto hit120 = make_delivery_plan(snapshot, slot, with120, CacheFormat::kVisible);
      hit120_ok += latency::is_successful(hit120, catalog, snapshot.budget,
                                          snapshot.deadline_s);

      std::map<int, CacheFormat> with360{{a, CacheFormat::kFull360}};
      auto hit360 = make_delivery_plan(snapshot, slot, with360, CacheFormat::kVisible);
      hit360_ok += latency::is_successful(hit360, catalog, snapshot.budget,
                                          snapshot.deadline_s);
    }
    items.push_back(
        {a, CacheFormat::kVisible, hit120_ok - miss_ok, u_j * info.size_visible_bits});
    items.push_back({a, CacheFormat::kFull360, hit360_ok - miss_ok, info.size_360_bits});
  }
  return items;
}

std::vector<std::pair<int, int>> plan_encoding(const std::map<int, CacheFormat>& entries) {
  std::vector<std::pair<int, int>> enc;
  for (const auto& [id, f] : entries) enc.emplace_back(id, static_cast<int>(f));
  return enc;  // std::map iterates in content-id order
}

// objective desc, then cheaper storage, then lexicographically smaller entries
bool plan_better(const CachePlan& a, const CachePlan& b) {
  if (a.objective != b.objective) return a.objective > b.objective;
  if (a.total_cost_bits != b.total_cost_bits) return a.total_cost_bits < b.total_cost_bits;
  return plan_encoding(a.entries) < plan_encoding(b.entries);
}

}  // namespace

CachePlan optimal_cache(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                        const FormatDecision& format_decision) {
  const auto items = cache_items(snapshot, catalog, format_decision);

  // Group the two formats of each content for the one-format-per-content walk.
  std::vector<std::pair<CacheItem, CacheItem>> grouped;
  for (std::size_t i = 0; i + 1 < items.size(); i += 2) {
    grouped.emplace_back(items[i], items[i + 1]);
  }

  // Remaining best-case gains for pruning.
  std::vector<int> tail_gain(grouped.size() + 1, 0);
  for (int i = static_cast<int>(grouped.size()) - 1; i >= 0; --i) {
    tail_gain[i] = tail_gain[i + 1] +
                   std::max({0, grouped[i].first.gain, grouped[i].second.gain});
  }

  CachePlan best;  // empty plan is always feasible
  CachePlan cur;
  auto dfs = [&](auto&& self, std::size_t idx) -> void {
    if (cur.objective + tail_gain[idx] < best.objective) return;
    if (idx == grouped.size()) {
      if (plan_better(cur, best)) best = cur;
      return;
    }
    const auto& [vis, full] = grouped[idx];
    for (const CacheItem* choice : {static_cast<const CacheItem*>(nullptr), &vis, &full}) {
      if (choice == nullptr) {
        self(self, idx + 1);
        continue;
      }
      if (cur.total_cost_bits + choice->cost_bits > snapshot.cache_capacity_bits) continue;
      cur.entries.emplace(choice->content, choice->format);
      cur.objective += choice->gain;
      cur.total_cost_bits += choice->cost_bits;
      self(self, idx + 1);
      cur.entries.erase(choice->content);
      cur.objective -= choice->gain;
      cur.total_cost_bits -= choice->cost_bits;
    }
  };
  dfs(dfs, 0);
  best.feasible = true;
  return best;
}

CachePlan greedy_cache(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                       const FormatDecision& format_decision) {
  auto items = cache_items(snapshot, catalog, format_decision);
  std::stable_sort(items.begin(), items.end(), [](const CacheItem& a, const CacheItem& b) {
    const double da = a.gain / std::max(a.cost_bits, 1.0);
    const double db = b.gain / std::max(b.cost_bits, 1.0);
    if (da != db) return da > db;
    if (a.cost_bits != b.cost_bits) return a.cost_bits < b.cost_bits;
    return a.content < b.content;
  });

  CachePlan plan;
  for (const auto& item : items) {
    if (item.gain <= 0) continue;
    if (plan.entries.count(item.content) > 0) continue;
    if (plan.total_cost_bits + item.cost_bits > snapshot.cache_capacity_bits) continue;
    plan.entries.emplace(item.content, item.format);
    plan.objective += item.gain;
    plan.total_cost_bits += item.cost_bits;
  }
  return plan;
}

FormatDecision brute_force_format(const SlotSnapshot& snapshot,
                                  const ContentCatalog& catalog,
                                  const CachePlan& cache_plan, int max_missed) {
  std::vector<int> missed_users;
  for (const auto& slot : snapshot.users) {
    if (cache_plan.entries.count(slot.request) == 0) missed_users.push_back(slot.user);
  }
  const int m = static_cast<int>(missed_users.size());
  if (m > max_missed) {
    throw ConfigError("brute_force_format: too many missed requests (" +
                      std::to_string(m) + " > " + std::to_string(max_missed) + ")");
  }

  FormatDecision best;
  int best_count = -1;
  for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
    FormatDecision candidate;
    for (int b = 0; b < m; ++b) {
      candidate[missed_users[b]] =
          (mask >> b) & 1 ? CacheFormat::kFull360 : CacheFormat::kVisible;
    }
    const int count = count_successes(snapshot, catalog, cache_plan, candidate).total();
    if (count > best_count) {
      best_count = count;
      best = candidate;
    }
  }
  return best;
}

CachePlan brute_force_cache(const SlotSnapshot& snapshot, const ContentCatalog& catalog,
                            const FormatDecision& format_decision, int max_catalog) {
  const int n = catalog.size();
  if (n > max_catalog) {
    throw ConfigError("brute_force_cache: catalog too large (" + std::to_string(n) +
                      " > " + std::to_string(max_catalog) + ")");
  }

  const int empty_count =
      count_successes(snapshot, catalog, CachePlan{}, format_decision).total();
  const int u_j = snapshot.users_at_sbs();

  CachePlan best;
  int best_count = empty_count;
  std::vector<int> trits(n, 0);  // 0 = skip, 1 = visible, 2 = full 360
  while (true) {
    CachePlan candidate;
    double cost = 0.0;
    for (int a = 0; a < n; ++a) {
      if (trits[a] == 0) continue;
      const auto f = trits[a] == 1 ? CacheFormat::kVisible : CacheFormat::kFull360;
      cost += f == CacheFormat::kFull360 ? catalog.info(a).size_360_bits
                                         : u_j * catalog.info(a).size_visible_bits;
      candidate.entries.emplace(a, f);
    }
    if (cost <= snapshot.cache_capacity_bits) {
      candidate.total_cost_bits = cost;
      const int count = count_successes(snapshot, catalog, candidate, format_decision).total();
      candidate.objective = count - empty_count;
      if (count > best_count || (count == best_count && plan_better(candidate, best))) {
        best_count = count;
        best = candidate;
      }
    }
    int pos = 0;
    while (pos < n && ++trits[pos] == 3) trits[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

}  // namespace elsm::oracle
