#include "elsm/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "elsm/rng.hpp"

namespace elsm::sim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

channel::Node disc_point(Rng& rng, double radius, double height,
                         channel::NodeKind kind, int id) {
  // sqrt keeps the areal density uniform
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = kTwoPi * rng.uniform();
  return {id, kind, r * std::cos(theta), r * std::sin(theta), height};
}

}  // namespace

Scenario generate_scenario(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Scenario s;
  Rng rng(Rng::key(seed, 0x73636e72ULL));
  for (int k = 0; k < cfg.v; ++k) {
    s.uavs.push_back(disc_point(rng, cfg.r_m, cfg.uav_alt_m, channel::NodeKind::kUav, k));
  }
  for (int j = 0; j < cfg.b; ++j) {
    s.sbss.push_back(disc_point(rng, cfg.r_m, cfg.sbs_h_m, channel::NodeKind::kSbs, j));
  }
  for (int i = 0; i < cfg.u; ++i) {
    s.users.push_back(disc_point(rng, cfg.r_m, cfg.user_h_m, channel::NodeKind::kUser, i));
  }
  s.catalog = cfg.catalog();
  const int slots = std::max(cfg.slots_total(), 1);
  s.trace = content::generate_requests({cfg.zipf_s, cfg.zipf_rotate_slots, cfg.zipf_rotate_stride}, cfg.u,
                                       s.catalog, slots, Rng::key(seed, 0x74726163ULL));
  return s;
}

std::uint64_t Scenario::topology_hash() const {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL;
  auto mix_double = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h = Rng::splitmix64(h);
  };
  for (const auto* group : {&uavs, &sbss, &users}) {
    for (const auto& n : *group) {
      mix_double(n.x);
      mix_double(n.y);
      mix_double(n.height);
    }
  }
  for (int c = 0; c < catalog.size(); ++c) {
    mix_double(static_cast<double>(catalog.info(c).uav));
  }
  return h;
}

std::vector<std::vector<int>> nearest_sbs_lists(const std::vector<channel::Node>& users,
                                                const std::vector<channel::Node>& sbss,
                                                int k) {
  std::vector<std::vector<int>> out(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    std::vector<std::pair<double, int>> by_dist;
    for (std::size_t j = 0; j < sbss.size(); ++j) {
      by_dist.emplace_back(channel::distance_3d(users[i], sbss[j]), static_cast<int>(j));
    }
    std::sort(by_dist.begin(), by_dist.end());
    const int keep = std::min<int>(k, static_cast<int>(by_dist.size()));
    for (int n = 0; n < keep; ++n) out[i].push_back(by_dist[n].second);
  }
  return out;
}

}  // namespace elsm::sim
