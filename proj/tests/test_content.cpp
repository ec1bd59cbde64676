#include <cmath>
#include <sstream>

#include "doctest.h"
#include "elsm/content.hpp"
#include "elsm/rng.hpp"

using namespace elsm;
using namespace elsm::content;

namespace {

ContentCatalog make_catalog(int n_contents, int contents_per_uav = 3) {
  std::vector<ContentInfo> infos;
  for (int i = 0; i < n_contents; ++i) {
    ContentInfo c;
    c.uav = i / contents_per_uav;
    infos.push_back(c);
  }
  return ContentCatalog(std::move(infos), 50e3);
}

}  // namespace

TEST_CASE("occupancy charges by stored format") {
  auto catalog = make_catalog(3);

  CacheState c360(0, 300e6, 20);
  REQUIRE(c360.admit(0, CacheFormat::kFull360, catalog).accepted);
  CHECK(occupancy(c360, catalog) == doctest::Approx(50e6).epsilon(1e-12));

  CacheState cvis(0, 300e6, 20);
  REQUIRE(cvis.admit(0, CacheFormat::kVisible, catalog).accepted);
  CHECK(occupancy(cvis, catalog) == doctest::Approx(20 * 12.5e6).epsilon(1e-12));

  CacheState empty(0, 300e6, 20);
  CHECK(occupancy(empty, catalog) == 0.0);
}

TEST_CASE("admit enforces the storage constraint with exact boundaries") {
  auto catalog = make_catalog(3);

  // 50 Mbit stored + 250 Mbit visible entry lands exactly at S = 300 Mbit.
  CacheState cache(0, 300e6, 20);
  REQUIRE(cache.admit(0, CacheFormat::kFull360, catalog).accepted);
  auto ok = cache.admit(1, CacheFormat::kVisible, catalog);
  CHECK(ok.accepted);
  CHECK(occupancy(cache, catalog) == doctest::Approx(300e6));

  // one bit short: rejected and the deficit says by how much
  CacheState tight(0, 50e6 - 1.0, 20);
  auto rej = tight.admit(0, CacheFormat::kFull360, catalog);
  CHECK_FALSE(rej.accepted);
  CHECK(rej.deficit_bits == doctest::Approx(1.0));

  CacheState fresh(0, 60e6, 1);
  CHECK(fresh.admit(2, CacheFormat::kFull360, catalog).accepted);

  // replacement is never silent
  CHECK_THROWS_AS(fresh.admit(2, CacheFormat::kVisible, catalog), ConfigError);
  fresh.evict(2);
  CHECK(fresh.admit(2, CacheFormat::kVisible, catalog).accepted);
}

TEST_CASE("occupancy matches a brute-force pass over random caches") {
  auto catalog = make_catalog(8);
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int users = 1 + static_cast<int>(rng.below(30));
    CacheState cache(0, 1e12, users);
    for (int id = 0; id < 8; ++id) {
      const auto roll = rng.below(3);
      if (roll == 0) continue;
      auto f = roll == 1 ? CacheFormat::kVisible : CacheFormat::kFull360;
      REQUIRE(cache.admit(id, f, catalog).accepted);
    }
    double expected = 0.0;
    for (const auto& [id, f] : cache.entries()) {
      expected += f == CacheFormat::kFull360
                      ? catalog.info(id).size_360_bits
                      : users * catalog.info(id).size_visible_bits;
    }
    CHECK(occupancy(cache, catalog) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("random admit/evict sequences never overflow capacity") {
  auto catalog = make_catalog(6);
  Rng rng(991);
  for (int trial = 0; trial < 50; ++trial) {
    CacheState cache(0, 150e6, 4);
    for (int step = 0; step < 200; ++step) {
      const int id = static_cast<int>(rng.below(6));
      if (rng.bernoulli(0.4)) {
        cache.evict(id);
      } else if (!cache.contains(id)) {
        auto f = rng.bernoulli(0.5) ? CacheFormat::kVisible : CacheFormat::kFull360;
        cache.admit(id, f, catalog);
      }
      CHECK(occupancy(cache, catalog) <= cache.capacity_bits());
    }
  }
}

TEST_CASE("zipf exponent zero is uniform") {
  auto catalog = make_catalog(5);
  const int horizon = 1000, users = 100;  // 1e5 draws
  auto trace = generate_requests({0.0}, users, catalog, horizon, 5);

  std::vector<int> counts(5, 0);
  for (int t = 0; t < horizon; ++t) {
    for (int u = 0; u < users; ++u) counts[trace.request(t, u)]++;
  }
  const double n = horizon * static_cast<double>(users);
  const double p = 1.0 / 5.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) CHECK(std::abs(c - n * p) < 3.0 * sigma);
}

TEST_CASE("request generation is seed-deterministic") {
  auto catalog = make_catalog(4);
  auto a = generate_requests({1.0}, 7, catalog, 50, 123);
  auto b = generate_requests({1.0}, 7, catalog, 50, 123);
  for (int t = 0; t < 50; ++t) {
    for (int u = 0; u < 7; ++u) CHECK(a.request(t, u) == b.request(t, u));
  }
}

TEST_CASE("zipf(1) over three contents puts 6/11 on rank one") {
  auto catalog = make_catalog(3);
  const int horizon = 1000, users = 100;
  auto trace = generate_requests({1.0}, users, catalog, horizon, 17);
  long long rank1 = 0;
  for (int t = 0; t < horizon; ++t) {
    for (int u = 0; u < users; ++u) rank1 += trace.request(t, u) == 0;
  }
  const double n = horizon * static_cast<double>(users);
  const double p = 6.0 / 11.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(rank1 - n * p) < 3.0 * sigma);
}

TEST_CASE("request trace round-trips through the text format") {
  auto catalog = make_catalog(4);
  auto trace = generate_requests({0.8}, 5, catalog, 20, 3);
  std::stringstream ss;
  trace.write(ss);
  auto back = RequestTrace::read(ss);
  REQUIRE(back.n_users() == trace.n_users());
  REQUIRE(back.horizon() == trace.horizon());
  for (int t = 0; t < 20; ++t) {
    for (int u = 0; u < 5; ++u) CHECK(back.request(t, u) == trace.request(t, u));
  }
}

TEST_CASE("per-content requester counts match an independent pass") {
  auto catalog = make_catalog(6);
  auto trace = generate_requests({1.2}, 12, catalog, 30, 9);
  std::vector<int> users = {0, 2, 3, 7, 11};
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int slot = static_cast<int>(rng.below(30));
    const int content = static_cast<int>(rng.below(6));
    int expected = 0;
    for (int u : users) {
      if (trace.request(slot, u) == content) ++expected;
    }
    CHECK(count_requesting(trace, slot, users, content) == expected);
  }
}

TEST_CASE("empty catalog and bad sizes are rejected") {
  auto catalog = make_catalog(2);
  CHECK_THROWS_AS(generate_requests({1.0}, 3, ContentCatalog{}, 5, 1), ConfigError);

  std::vector<ContentInfo> bad(1);
  bad[0].size_visible_bits = bad[0].size_360_bits;  // must be strictly smaller
  CHECK_THROWS_AS(ContentCatalog(std::move(bad), 50e3), ConfigError);

  CHECK_THROWS_AS(catalog.info(99), ConfigError);
}
