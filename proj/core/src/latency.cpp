#include "elsm/latency.hpp"

namespace elsm::latency {

namespace {

// bits / (bits per second), yielding kUnreachable on a dead link.
double over(double bits, double bps) {
  if (bps <= 0.0) return kUnreachable;
  return bits / bps;
}

}  // namespace

double transmission_delay(const DeliveryPlan& plan, const ContentCatalog& catalog) {
  const auto& info = catalog.info(plan.content);
  const double a = catalog.tracking_payload_bits();
  const double access = over(info.size_visible_bits, plan.c_sd_bps) + over(a, plan.c_su_bps);

  if (plan.cache_hit) return access;

  double backhaul_content;
  if (plan.transmit_format == CacheFormat::kVisible) {
    backhaul_content = over(info.size_visible_bits, plan.c_vd_bps);
  } else {
    if (plan.users_requesting < 1) {
      throw ConfigError("miss with 360 format requires at least one requesting user");
    }
    backhaul_content =
        over(info.size_360_bits / plan.users_requesting, plan.c_vd_bps);
  }
  return backhaul_content + over(a, plan.c_vu_bps) + access;
}

double uav_processing(const DeliveryPlan& plan, const ContentCatalog& catalog,
                      const ComputeBudget& budget) {
  if (plan.cache_hit || plan.transmit_format != CacheFormat::kVisible) return 0.0;
  const double share = budget.uav_shared_across_sbs ? plan.sbs_count : 1;
  return catalog.info(plan.content).extract_workload_bits * plan.users_at_sbs * share /
         budget.uav_bps;
}

double sbs_processing(const DeliveryPlan& plan, const ContentCatalog& catalog,
                      const ComputeBudget& budget) {
  const bool extracting =
      (plan.cache_hit && plan.cached_format == CacheFormat::kFull360) ||
      (!plan.cache_hit && plan.transmit_format == CacheFormat::kFull360);
  if (!extracting) return 0.0;
  return catalog.info(plan.content).extract_workload_bits * plan.users_at_sbs /
         budget.sbs_bps;
}

double total_delay(const DeliveryPlan& plan, const ContentCatalog& catalog,
                   const ComputeBudget& budget) {
  return transmission_delay(plan, catalog) + uav_processing(plan, catalog, budget) +
         sbs_processing(plan, catalog, budget);
}

bool is_successful(const DeliveryPlan& plan, const ContentCatalog& catalog,
                   const ComputeBudget& budget, double deadline_s) {
  return total_delay(plan, catalog, budget) <= deadline_s;
}

}  // namespace elsm::latency
