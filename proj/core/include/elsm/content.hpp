#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "elsm/errors.hpp"

namespace elsm::content {

enum class CacheFormat : std::uint8_t { kVisible, kFull360 };

struct ContentInfo {
  int uav = 0;                     // owning UAV (exactly one per content)
  double size_360_bits = 50e6;     // G_360
  double size_visible_bits = 12.5e6;  // G_120
  double extract_workload_bits = 50e6;  // H_ia; defaults to the full sphere
};

/// Catalog of all contents the UAV fleet can provide, plus the tracking
/// payload size used on every uplink.
class ContentCatalog {
 public:
  ContentCatalog() = default;
  ContentCatalog(std::vector<ContentInfo> contents, double tracking_payload_bits);

  int size() const { return static_cast<int>(contents_.size()); }
  const ContentInfo& info(int content_id) const;
  double tracking_payload_bits() const { return tracking_bits_; }
  const std::vector<int>& contents_of_uav(int uav) const;
  int n_uavs() const { return static_cast<int>(by_uav_.size()); }

 private:
  std::vector<ContentInfo> contents_;
  std::vector<std::vector<int>> by_uav_;
  double tracking_bits_ = 50e3;
};

/// Per-SBS cache: at most one entry per content, each stored either as a
/// single 360-degree copy or as per-user visible copies. The visible
/// storage cost scales with the number of associated users.
class CacheState {
 public:
  CacheState(int sbs_id, double capacity_bits, int associated_user_count);

  int sbs_id() const { return sbs_id_; }
  double capacity_bits() const { return capacity_bits_; }
  int associated_user_count() const { return users_; }
  void set_associated_user_count(int users);

  const std::map<int, CacheFormat>& entries() const { return entries_; }
  std::optional<CacheFormat> lookup(int content_id) const;
  bool contains(int content_id) const { return entries_.count(content_id) > 0; }

  /// Storage charge of one entry: G_360 for a 360 copy, U_j * G_120 for
  /// per-user visible copies.
  double entry_cost(int content_id, CacheFormat f, const ContentCatalog& catalog) const;

  struct AdmitResult {
    bool accepted = false;
    double deficit_bits = 0.0;  // shortfall when rejected
  };

  /// Insert iff the capacity constraint still holds afterwards. Existing
  /// entries are never replaced implicitly; call evict first.
  AdmitResult admit(int content_id, CacheFormat f, const ContentCatalog& catalog);
  void evict(int content_id);
  void clear() { entries_.clear(); }

 private:
  int sbs_id_;
  double capacity_bits_;
  int users_;
  std::map<int, CacheFormat> entries_;
};

/// Total storage charge of a cache against a catalog.
double occupancy(const CacheState& cache, const ContentCatalog& catalog);

/// One requested content per user per time slot.
class RequestTrace {
 public:
  RequestTrace() = default;
  RequestTrace(int n_users, int horizon);

  int n_users() const { return n_users_; }
  int horizon() const { return horizon_; }
  int request(int slot, int user) const;
  void set_request(int slot, int user, int content_id);

  void write(std::ostream& os) const;          // lines of "t,user_id,content_id"
  static RequestTrace read(std::istream& is);  // throws ConfigError on malformed input

 private:
  int n_users_ = 0;
  int horizon_ = 0;
  std::vector<int> requests_;
};

struct ZipfParams {
  double exponent = 1.0;
  /// When positive, the popularity ranking cycles by `rotate_stride`
  /// contents every `rotate_every_slots` slots (live content goes stale);
  /// 0 keeps the ranking fixed so marginals are exactly Zipf.
  int rotate_every_slots = 0;
  int rotate_stride = 1;
};

/// Seed-deterministic Zipf(exponent) requests over the whole catalog.
RequestTrace generate_requests(const ZipfParams& popularity, int n_users,
                               const ContentCatalog& catalog, int horizon,
                               std::uint64_t seed);

/// Number of `users` (ids) requesting `content_id` at `slot`.
int count_requesting(const RequestTrace& trace, int slot,
                     const std::vector<int>& users, int content_id);

}  // namespace elsm::content
