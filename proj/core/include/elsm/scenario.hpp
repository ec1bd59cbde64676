#pragma once

#include <cstdint>
#include <vector>

#include "elsm/channel.hpp"
#include "elsm/config.hpp"
#include "elsm/content.hpp"

namespace elsm::sim {

/// A drawn network instance: node placements, the content catalog, and the
/// request trace covering the configured horizon.
struct Scenario {
  std::vector<channel::Node> uavs;
  std::vector<channel::Node> sbss;
  std::vector<channel::Node> users;
  content::ContentCatalog catalog;
  content::RequestTrace trace;

  std::uint64_t topology_hash() const;
};

/// Uniform placements over the disc of the configured radius; heights from
/// the config; requests Zipf over the catalog. Fully determined by
/// (config, seed).
Scenario generate_scenario(const SimConfig& cfg, std::uint64_t seed);

/// The k nearest SBS indices for each user, nearest first.
std::vector<std::vector<int>> nearest_sbs_lists(const std::vector<channel::Node>& users,
                                                const std::vector<channel::Node>& sbss,
                                                int k);

}  // namespace elsm::sim
