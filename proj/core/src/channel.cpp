#include "elsm/channel.hpp"

#include <cmath>
#include <limits>

#include "elsm/rng.hpp"
#include "elsm/units.hpp"

namespace elsm::channel {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double distance_3d(const Node& a, const Node& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.height - b.height;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void RadioParams::validate() const {
  if (carrier_freq_hz <= 0) throw ConfigError("carrier frequency must be positive");
  if (ref_distance_m <= 0) throw ConfigError("reference distance must be positive");
  if (pl_exp_los > pl_exp_nlos) throw ConfigError("mu_LoS must not exceed mu_NLoS");
  if (sub6_nlos_atten < 1.0) throw ConfigError("eta must be >= 1");
  if (env_x <= 0 || env_y <= 0) throw ConfigError("environment constants must be positive");
  if (noise_power_w <= 0) throw ConfigError("noise power must be positive");
  for (double p : {tx_power_uav_w, tx_power_sbs_w, tx_power_user_w}) {
    if (!(std::isfinite(p) && p > 0)) throw ConfigError("transmit powers must be finite and positive");
  }
}

void Bandwidths::validate() const {
  for (double b : {backhaul_down_hz, backhaul_up_hz, access_down_hz, access_up_hz}) {
    if (!(b > 0)) throw ConfigError("bandwidths must be strictly positive");
  }
}

double free_space_loss(const RadioParams& params) {
  return 20.0 * std::log10(params.ref_distance_m * params.carrier_freq_hz * 4.0 *
                           kPi / kSpeedOfLight);
}

double mmwave_path_loss(const RadioParams& params, double distance_m, bool los,
                        double shadow_sample_db) {
  if (distance_m < params.ref_distance_m) {
    throw std::domain_error("mmwave_path_loss: distance below reference distance");
  }
  const double mu = los ? params.pl_exp_los : params.pl_exp_nlos;
  return free_space_loss(params) + 10.0 * mu * std::log10(distance_m) + shadow_sample_db;
}

double sub6_path_loss(const RadioParams& params, double distance_m, bool los) {
  if (distance_m <= 0) throw std::domain_error("sub6_path_loss: non-positive distance");
  double loss = 10.0 * params.sub6_pl_exp * std::log10(distance_m);
  if (!los) loss += linear_to_db(params.sub6_nlos_atten);
  return loss;
}

double los_probability(const RadioParams& params, const Node& uav, const Node& ground) {
  const double d = distance_3d(uav, ground);
  if (d <= 0) throw std::domain_error("los_probability: coincident nodes");
  const double dh = uav.height - ground.height;
  if (dh <= 0) throw std::domain_error("los_probability: UAV not above ground node");
  // Elevation angle from the slant path, in degrees.
  const double phi = std::asin(dh / d) * 180.0 / kPi;
  return 1.0 / (1.0 + params.env_x * std::exp(-params.env_y * (phi - params.env_x)));
}

double average_path_loss(const RadioParams& params, const Node& uav, const Node& ground) {
  const double p_los = los_probability(params, uav, ground);
  const double d = distance_3d(uav, ground);
  const double l_los = mmwave_path_loss(params, d, true, 0.0);
  const double l_nlos = mmwave_path_loss(params, d, false, 0.0);
  return p_los * l_los + (1.0 - p_los) * l_nlos;
}

namespace {

double snr_from_loss_db(double tx_power_w, double loss_db, double noise_w) {
  return tx_power_w / (db_to_linear(loss_db) * noise_w);
}

double per_user_capacity(double bandwidth_hz, int users, double snr) {
  return bandwidth_hz / static_cast<double>(users) * std::log2(1.0 + snr);
}

}  // namespace

BackhaulBudget backhaul_capacity_per_user(const RadioParams& params,
                                          const Bandwidths& bw, const Node& uav,
                                          const Node& sbs, int users_at_sbs) {
  if (users_at_sbs < 1) throw ConfigError("backhaul capacity undefined for zero users");
  const double p_los = los_probability(params, uav, sbs);
  const double d = distance_3d(uav, sbs);

  BackhaulBudget out;
  out.down.avg_path_loss_db = average_path_loss(params, uav, sbs);
  out.down.avg_snr_linear =
      snr_from_loss_db(params.tx_power_uav_w, out.down.avg_path_loss_db, params.noise_power_w);
  out.down.capacity_bps_per_user =
      per_user_capacity(bw.backhaul_down_hz, users_at_sbs, out.down.avg_snr_linear);

  out.up.avg_path_loss_db = p_los * sub6_path_loss(params, d, true) +
                            (1.0 - p_los) * sub6_path_loss(params, d, false);
  out.up.avg_snr_linear =
      snr_from_loss_db(params.tx_power_sbs_w, out.up.avg_path_loss_db, params.noise_power_w);
  out.up.capacity_bps_per_user =
      per_user_capacity(bw.backhaul_up_hz, users_at_sbs, out.up.avg_snr_linear);
  return out;
}

ChannelGainModel::ChannelGainModel(int n_users, int n_sbs)
    : n_users_(n_users),
      n_sbs_(n_sbs),
      gain_(static_cast<std::size_t>(n_users) * n_sbs,
            std::numeric_limits<double>::quiet_NaN()) {}

void ChannelGainModel::set(int user, int sbs, double gain) {
  gain_.at(static_cast<std::size_t>(user) * n_sbs_ + sbs) = gain;
}

double ChannelGainModel::at(int user, int sbs) const {
  const double g = gain_.at(static_cast<std::size_t>(user) * n_sbs_ + sbs);
  if (std::isnan(g)) throw ConfigError("channel gain entry missing");
  return g;
}

ChannelGainModel ChannelGainModel::distance_rayleigh(const RadioParams& params,
                                                     std::span<const Node> users,
                                                     std::span<const Node> sbs,
                                                     std::uint64_t seed,
                                                     std::uint64_t slot) {
  ChannelGainModel m(static_cast<int>(users.size()), static_cast<int>(sbs.size()));
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (std::size_t j = 0; j < sbs.size(); ++j) {
      Rng rng(Rng::key(seed, 0x6761696eULL, slot, i, j));
      const double d = distance_3d(users[i], sbs[j]);
      m.set(static_cast<int>(i), static_cast<int>(j),
            std::pow(d, -params.sub6_pl_exp) * rng.exponential());
    }
  }
  return m;
}

ChannelGainModel ChannelGainModel::distance_only(const RadioParams& params,
                                                 std::span<const Node> users,
                                                 std::span<const Node> sbs) {
  ChannelGainModel m(static_cast<int>(users.size()), static_cast<int>(sbs.size()));
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (std::size_t j = 0; j < sbs.size(); ++j) {
      const double d = distance_3d(users[i], sbs[j]);
      m.set(static_cast<int>(i), static_cast<int>(j), std::pow(d, -params.sub6_pl_exp));
    }
  }
  return m;
}

AccessBudget access_capacity(const RadioParams& params, const Bandwidths& bw,
                             int sbs_index, int user_index, int n_sbs, int n_users,
                             const ChannelGainModel& gains, int users_at_sbs) {
  if (users_at_sbs < 1) throw ConfigError("access capacity undefined for zero users");

  double dl_interf = 0.0;
  for (int n = 0; n < n_sbs; ++n) {
    if (n == sbs_index) continue;
    dl_interf += params.tx_power_sbs_w * gains.at(user_index, n);
  }
  const double dl_sinr = params.tx_power_sbs_w * gains.at(user_index, sbs_index) /
                         (dl_interf + params.noise_power_w);

  double ul_interf = 0.0;
  for (int n = 0; n < n_users; ++n) {
    if (n == user_index) continue;
    ul_interf += params.tx_power_user_w * gains.at(n, sbs_index);
  }
  const double ul_sinr = params.tx_power_user_w * gains.at(user_index, sbs_index) /
                         (ul_interf + params.noise_power_w);

  AccessBudget out;
  out.down_bps = per_user_capacity(bw.access_down_hz, users_at_sbs, dl_sinr);
  out.up_bps = per_user_capacity(bw.access_up_hz, users_at_sbs, ul_sinr);
  return out;
}

}  // namespace elsm::channel
