#include <cmath>

#include "doctest.h"
#include "elsm/channel.hpp"
#include "elsm/rng.hpp"
#include "elsm/units.hpp"

using namespace elsm;
using namespace elsm::channel;

namespace {

RadioParams table_defaults() { return RadioParams{}; }

Node uav_at(double x, double y, double alt) { return {0, NodeKind::kUav, x, y, alt}; }
Node sbs_at(double x, double y, double h = 0.0) { return {0, NodeKind::kSbs, x, y, h}; }

}  // namespace

TEST_CASE("free-space reference loss") {
  auto p = table_defaults();  // d0 = 5 m, fc = 38 GHz
  CHECK(free_space_loss(p) == doctest::Approx(78.02285524093995).epsilon(1e-12));

  // d0 * fc * 4pi / c = 1  =>  0 dB
  RadioParams unity = p;
  unity.ref_distance_m = 1.0;
  unity.carrier_freq_hz = kSpeedOfLight / (4.0 * 3.14159265358979323846);
  CHECK(free_space_loss(unity) == doctest::Approx(0.0).epsilon(1e-12));

  RadioParams doubled = p;
  doubled.ref_distance_m = 10.0;
  CHECK(free_space_loss(doubled) - free_space_loss(p) ==
        doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
}

TEST_CASE("mmWave log-distance loss") {
  auto p = table_defaults();
  CHECK(mmwave_path_loss(p, 5.0, true, 0.0) ==
        doctest::Approx(92.00225532766032).epsilon(1e-12));

  RadioParams near = p;
  near.ref_distance_m = 1.0;
  CHECK(mmwave_path_loss(near, 1.0, true, 0.0) ==
        doctest::Approx(free_space_loss(near)).epsilon(1e-12));

  // NLoS exponent exceeds LoS, so the NLoS loss is larger at any d > 1.
  CHECK(mmwave_path_loss(p, 50.0, false, 0.0) > mmwave_path_loss(p, 50.0, true, 0.0));

  CHECK_THROWS_AS(mmwave_path_loss(p, 4.0, true, 0.0), std::domain_error);
}

TEST_CASE("LoS probability follows the elevation-angle logistic") {
  auto p = table_defaults();
  // elevation 45 degrees: d = sqrt(2) * h
  Node uav = uav_at(100.0, 0.0, 100.0);
  Node sbs = sbs_at(0.0, 0.0);
  CHECK(los_probability(p, uav, sbs) ==
        doctest::Approx(0.8613396628695336).epsilon(1e-12));

  CHECK_THROWS_AS(los_probability(p, sbs_at(0, 0), sbs_at(0, 0)), std::domain_error);

  // strictly increasing in elevation at fixed slant behaviour
  double prev = 0.0;
  for (double horiz : {400.0, 300.0, 200.0, 100.0, 50.0, 10.0}) {
    const double pl = los_probability(p, uav_at(horiz, 0, 100.0), sbs);
    CHECK(pl > prev);
    CHECK(pl > 0.0);
    CHECK(pl < 1.0);
    prev = pl;
  }
}

TEST_CASE("average path loss mixes LoS and NLoS by probability") {
  auto p = table_defaults();
  Node uav = uav_at(200.0, 0.0, 100.0);
  Node sbs = sbs_at(0.0, 0.0);

  const double p_los = los_probability(p, uav, sbs);
  const double d = distance_3d(uav, sbs);
  const double expected = p_los * mmwave_path_loss(p, d, true, 0.0) +
                          (1.0 - p_los) * mmwave_path_loss(p, d, false, 0.0);
  CHECK(average_path_loss(p, uav, sbs) == doctest::Approx(expected).epsilon(1e-12));

  // Frozen from an independent scalar evaluation of the chained formulas
  // (elevation 26.565 deg, P_LoS 0.36122).
  CHECK(average_path_loss(p, uav, sbs) ==
        doctest::Approx(131.01579055276113).epsilon(1e-12));
}

TEST_CASE("backhaul per-user capacities") {
  auto p = table_defaults();
  Bandwidths bw;  // Table defaults: 2 GHz down, 500 MHz up
  Node uav = uav_at(200.0, 0.0, 100.0);
  Node sbs = sbs_at(0.0, 0.0);

  auto b4 = backhaul_capacity_per_user(p, bw, uav, sbs, 4);
  CHECK(b4.down.avg_snr_linear == doctest::Approx(0.2502770023933063).epsilon(1e-12));
  CHECK(b4.down.capacity_bps_per_user ==
        doctest::Approx(161123881.7261986).epsilon(1e-9));
  CHECK(b4.up.capacity_bps_per_user ==
        doctest::Approx(3124051606.875091).epsilon(1e-9));

  // doubling the user count halves both capacities exactly
  auto b8 = backhaul_capacity_per_user(p, bw, uav, sbs, 8);
  CHECK(b8.down.capacity_bps_per_user ==
        doctest::Approx(b4.down.capacity_bps_per_user / 2.0).epsilon(1e-12));
  CHECK(b8.up.capacity_bps_per_user ==
        doctest::Approx(b4.up.capacity_bps_per_user / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(backhaul_capacity_per_user(p, bw, uav, sbs, 0), ConfigError);
}

TEST_CASE("access capacity reduces to the SNR form without interference") {
  auto p = table_defaults();
  Bandwidths bw;

  ChannelGainModel gains(1, 1);
  gains.set(0, 0, 2.0e-5);
  auto a = access_capacity(p, bw, 0, 0, 1, 1, gains, 1);
  const double snr_dl = p.tx_power_sbs_w * 2.0e-5 / p.noise_power_w;
  CHECK(a.down_bps ==
        doctest::Approx(bw.access_down_hz * std::log2(1.0 + snr_dl)).epsilon(1e-12));

  // SINR = 1 gives exactly B/U bits/s/Hz * 1
  ChannelGainModel unit(1, 1);
  unit.set(0, 0, p.noise_power_w / p.tx_power_sbs_w);
  auto e = access_capacity(p, bw, 0, 0, 1, 1, unit, 4);
  CHECK(e.down_bps == doctest::Approx(bw.access_down_hz / 4.0).epsilon(1e-12));
}

TEST_CASE("equal-power interferer keeps downlink SINR below one") {
  auto p = table_defaults();
  Bandwidths bw;
  ChannelGainModel gains(1, 2);
  gains.set(0, 0, 1e-4);
  gains.set(0, 1, 1e-4);
  auto a = access_capacity(p, bw, 0, 0, 2, 1, gains, 1);
  const double sinr = p.tx_power_sbs_w * 1e-4 / (p.tx_power_sbs_w * 1e-4 + p.noise_power_w);
  CHECK(sinr < 1.0);
  CHECK(a.down_bps == doctest::Approx(bw.access_down_hz * std::log2(1.0 + sinr)).epsilon(1e-12));
}

TEST_CASE("seeded Rayleigh grid pins the full SINR evaluation") {
  auto p = table_defaults();
  Bandwidths bw;
  std::vector<Node> users = {{0, NodeKind::kUser, 50, 0, 1.5}, {1, NodeKind::kUser, -80, 40, 1.5}};
  std::vector<Node> sbs = {{0, NodeKind::kSbs, 0, 0, 10}, {1, NodeKind::kSbs, 120, -30, 10}};

  auto gains = ChannelGainModel::distance_rayleigh(p, users, sbs, 42, 7);
  auto same = ChannelGainModel::distance_rayleigh(p, users, sbs, 42, 7);
  CHECK(gains.at(0, 0) == same.at(0, 0));  // keyed draws are reproducible

  // direct evaluation of the SINR sums on the logged gains
  const double num = p.tx_power_sbs_w * gains.at(0, 0);
  const double interf = p.tx_power_sbs_w * gains.at(0, 1);
  const double expected_dl =
      bw.access_down_hz / 2.0 * std::log2(1.0 + num / (interf + p.noise_power_w));
  auto a = access_capacity(p, bw, 0, 0, 2, 2, gains, 2);
  CHECK(a.down_bps == doctest::Approx(expected_dl).epsilon(1e-12));

  const double up_num = p.tx_power_user_w * gains.at(0, 0);
  const double up_interf = p.tx_power_user_w * gains.at(1, 0);
  const double expected_ul =
      bw.access_up_hz / 2.0 * std::log2(1.0 + up_num / (up_interf + p.noise_power_w));
  CHECK(a.up_bps == doctest::Approx(expected_ul).epsilon(1e-12));

  ChannelGainModel sparse(2, 2);
  sparse.set(0, 0, 1e-4);
  CHECK_THROWS_AS(access_capacity(p, bw, 0, 0, 2, 2, sparse, 1), ConfigError);
}

TEST_CASE("LoS and NLoS probabilities always partition") {
  auto p = table_defaults();
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    Node uav = uav_at(rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(50, 300));
    Node g = sbs_at(rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(0, 20));
    const double pl = los_probability(p, uav, g);
    CHECK(pl > 0.0);
    CHECK(pl < 1.0);
    CHECK(pl + (1.0 - pl) == doctest::Approx(1.0));
  }
}

TEST_CASE("average loss grows with distance at fixed elevation") {
  auto p = table_defaults();
  Node sbs = sbs_at(0.0, 0.0);
  double prev = 0.0;
  for (double scale = 1.0; scale < 8.0; scale *= 1.5) {
    Node uav = uav_at(100.0 * scale, 0.0, 60.0 * scale);
    const double l = average_path_loss(p, uav, sbs);
    CHECK(l > prev);
    prev = l;
  }
}

TEST_CASE("sampled shadowing converges to the zero-shadow mean") {
  auto p = table_defaults();
  const int n = 100000;
  Rng rng(1234);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += mmwave_path_loss(p, 150.0, true, rng.gaussian(0.0, p.shadow_sigma_los_db));
  }
  const double mean = sum / n;
  const double expected = mmwave_path_loss(p, 150.0, true, 0.0);
  const double stderr3 = 3.0 * p.shadow_sigma_los_db / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - expected) < stderr3);
}
