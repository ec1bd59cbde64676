#pragma once

#include <limits>

#include "elsm/content.hpp"

namespace elsm::latency {

using content::CacheFormat;
using content::ContentCatalog;

/// Sentinel for deliveries that can never complete (a required link has
/// zero capacity). Counted as a guaranteed deadline miss; never folded
/// into delay statistics.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();
inline bool unreachable(double delay_s) { return !(delay_s < kUnreachable); }

/// Everything needed to cost one content delivery to one user in one slot.
/// Exactly one of cache_hit / transmit_format governs the path taken.
struct DeliveryPlan {
  int user = 0;
  int content = 0;
  int sbs = 0;
  int uav = 0;

  bool cache_hit = false;
  CacheFormat cached_format = CacheFormat::kVisible;    // valid when cache_hit
  CacheFormat transmit_format = CacheFormat::kVisible;  // valid on a miss

  double c_vd_bps = 0.0;  // UAV->SBS per-user content capacity
  double c_vu_bps = 0.0;  // SBS->UAV per-user tracking capacity
  double c_sd_bps = 0.0;  // SBS->user content capacity
  double c_su_bps = 0.0;  // user->SBS tracking capacity

  int users_at_sbs = 1;       // U_j
  int users_requesting = 1;   // U_ja, multicast divisor for 360 backhaul
  int sbs_count = 1;          // B, for the shared-UAV-compute mode
};

struct ComputeBudget {
  double uav_bps = 1e9;  // R_U
  double sbs_bps = 2e9;  // R_S
  /// When set, each UAV's extraction budget is split across all B SBSs
  /// (effective rate R_U / (B * U_j)); otherwise R_U / U_j.
  bool uav_shared_across_sbs = true;

  void validate() const {
    if (!(uav_bps > 0 && sbs_bps > 0)) throw ConfigError("compute rates must be positive");
    if (uav_bps > sbs_bps) throw ConfigError("expected R_U <= R_S");
  }
};

/// Content plus tracking transmission time; case-wise over
/// {miss+visible, miss+360 (multicast-shared backhaul), hit}.
double transmission_delay(const DeliveryPlan& plan, const ContentCatalog& catalog);

/// UAV-side visible-content extraction time; nonzero only on a miss with
/// visible transmit format.
double uav_processing(const DeliveryPlan& plan, const ContentCatalog& catalog,
                      const ComputeBudget& budget);

/// SBS-side extraction time; nonzero when serving from a 360 cache entry or
/// receiving a 360 transfer.
double sbs_processing(const DeliveryPlan& plan, const ContentCatalog& catalog,
                      const ComputeBudget& budget);

double total_delay(const DeliveryPlan& plan, const ContentCatalog& catalog,
                   const ComputeBudget& budget);

bool is_successful(const DeliveryPlan& plan, const ContentCatalog& catalog,
                   const ComputeBudget& budget, double deadline_s);

/// Running per-user success average.
struct ReliabilityRecord {
  long long successes = 0;
  long long trials = 0;

  double reliability() const {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
};

inline void update_reliability(ReliabilityRecord& record, bool outcome) {
  record.trials += 1;
  if (outcome) record.successes += 1;
}

}  // namespace elsm::latency
