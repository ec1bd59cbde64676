#include "elsm/content.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "elsm/rng.hpp"

namespace elsm::content {

ContentCatalog::ContentCatalog(std::vector<ContentInfo> contents,
                               double tracking_payload_bits)
    : contents_(std::move(contents)), tracking_bits_(tracking_payload_bits) {
  if (tracking_bits_ <= 0) throw ConfigError("tracking payload must be positive");
  int max_uav = -1;
  for (const auto& c : contents_) max_uav = std::max(max_uav, c.uav);
  by_uav_.resize(max_uav + 1);
  for (std::size_t id = 0; id < contents_.size(); ++id) {
    const auto& c = contents_[id];
    if (c.uav < 0) throw ConfigError("content assigned to negative UAV id");
    if (c.size_360_bits <= 0 || c.size_visible_bits <= 0 || c.extract_workload_bits <= 0) {
      throw ConfigError("content sizes must be positive");
    }
    if (c.size_visible_bits >= c.size_360_bits) {
      throw ConfigError("visible size must be smaller than the 360 size");
    }
    by_uav_[c.uav].push_back(static_cast<int>(id));
  }
}

const ContentInfo& ContentCatalog::info(int content_id) const {
  if (content_id < 0 || content_id >= size()) {
    throw ConfigError("unknown content id " + std::to_string(content_id));
  }
  return contents_[content_id];
}

const std::vector<int>& ContentCatalog::contents_of_uav(int uav) const {
  if (uav < 0 || uav >= n_uavs()) throw ConfigError("unknown UAV id");
  return by_uav_[uav];
}

CacheState::CacheState(int sbs_id, double capacity_bits, int associated_user_count)
    : sbs_id_(sbs_id), capacity_bits_(capacity_bits), users_(associated_user_count) {
  if (capacity_bits < 0) throw ConfigError("cache capacity must be non-negative");
  if (users_ < 0) throw ConfigError("associated user count must be non-negative");
}

void CacheState::set_associated_user_count(int users) {
  if (users < 0) throw ConfigError("associated user count must be non-negative");
  users_ = users;
}

std::optional<CacheFormat> CacheState::lookup(int content_id) const {
  auto it = entries_.find(content_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double CacheState::entry_cost(int content_id, CacheFormat f,
                              const ContentCatalog& catalog) const {
  const auto& info = catalog.info(content_id);
  return f == CacheFormat::kFull360 ? info.size_360_bits
                                    : users_ * info.size_visible_bits;
}

CacheState::AdmitResult CacheState::admit(int content_id, CacheFormat f,
                                          const ContentCatalog& catalog) {
  if (entries_.count(content_id) > 0) {
    throw ConfigError("admit: content already cached; evict explicitly first");
  }
  const double after = occupancy(*this, catalog) + entry_cost(content_id, f, catalog);
  if (after > capacity_bits_) {
    return {false, after - capacity_bits_};
  }
  entries_.emplace(content_id, f);
  return {true, 0.0};
}

void CacheState::evict(int content_id) { entries_.erase(content_id); }

double occupancy(const CacheState& cache, const ContentCatalog& catalog) {
  double total = 0.0;
  for (const auto& [id, fmt] : cache.entries()) {
    total += cache.entry_cost(id, fmt, catalog);
  }
  return total;
}

RequestTrace::RequestTrace(int n_users, int horizon)
    : n_users_(n_users),
      horizon_(horizon),
      requests_(static_cast<std::size_t>(n_users) * horizon, -1) {}

int RequestTrace::request(int slot, int user) const {
  return requests_.at(static_cast<std::size_t>(slot) * n_users_ + user);
}

void RequestTrace::set_request(int slot, int user, int content_id) {
  requests_.at(static_cast<std::size_t>(slot) * n_users_ + user) = content_id;
}

void RequestTrace::write(std::ostream& os) const {
  for (int t = 0; t < horizon_; ++t) {
    for (int u = 0; u < n_users_; ++u) {
      os << t << ',' << u << ',' << request(t, u) << '\n';
    }
  }
}

RequestTrace RequestTrace::read(std::istream& is) {
  struct Row {
    int t, u, c;
  };
  std::vector<Row> rows;
  int max_t = -1, max_u = -1;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Row r{};
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    if (!(ls >> r.t >> c1 >> r.u >> c2 >> r.c) || c1 != ',' || c2 != ',') {
      throw ConfigError("malformed request trace line: " + line);
    }
    rows.push_back(r);
    max_t = std::max(max_t, r.t);
    max_u = std::max(max_u, r.u);
  }
  RequestTrace trace(max_u + 1, max_t + 1);
  for (const auto& r : rows) trace.set_request(r.t, r.u, r.c);
  return trace;
}

RequestTrace generate_requests(const ZipfParams& popularity, int n_users,
                               const ContentCatalog& catalog, int horizon,
                               std::uint64_t seed) {
  if (catalog.size() == 0) throw ConfigError("cannot generate requests over an empty catalog");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");

  // Zipf pmf over content ranks; rank r (1-based) gets r^-s / H_{N,s}.
  std::vector<double> cdf(catalog.size());
  double norm = 0.0;
  for (int r = 1; r <= catalog.size(); ++r) {
    norm += std::pow(static_cast<double>(r), -popularity.exponent);
    cdf[r - 1] = norm;
  }
  for (auto& v : cdf) v /= norm;

  RequestTrace trace(n_users, horizon);
  const int n = catalog.size();
  for (int t = 0; t < horizon; ++t) {
    const int shift = popularity.rotate_every_slots > 0
                          ? (t / popularity.rotate_every_slots * popularity.rotate_stride) % n
                          : 0;
    for (int u = 0; u < n_users; ++u) {
      Rng rng(Rng::key(seed, 0x72657175ULL, t, u));
      const double x = rng.uniform();
      const auto rank = static_cast<int>(
          std::lower_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
      trace.set_request(t, u, (rank + shift) % n);
    }
  }
  return trace;
}

int count_requesting(const RequestTrace& trace, int slot,
                     const std::vector<int>& users, int content_id) {
  int n = 0;
  for (int u : users) {
    if (trace.request(slot, u) == content_id) ++n;
  }
  return n;
}

}  // namespace elsm::content
