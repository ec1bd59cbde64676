#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elsm/errors.hpp"

namespace elsm::channel {

enum class NodeKind { kUav, kSbs, kUser };

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::kUser;
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;  // altitude for UAVs, antenna height for ground nodes
};

double distance_3d(const Node& a, const Node& b);

/// Radio-layer constants shared by every link computation.
///
/// The mmWave backhaul uses the log-normal shadowing model
/// (reference free-space loss at d0 plus a 10*mu*log10(d) distance term);
/// the sub-6GHz uplink uses a plain d^beta power law with an extra NLoS
/// attenuation factor eta >= 1.
struct RadioParams {
  double carrier_freq_hz = 38e9;
  double ref_distance_m = 5.0;
  double pl_exp_los = 2.0;
  double pl_exp_nlos = 2.4;
  double shadow_sigma_los_db = 5.3;
  double shadow_sigma_nlos_db = 5.27;
  double sub6_pl_exp = 2.0;      // beta
  double sub6_nlos_atten = 100;  // eta, linear factor >= 1
  double env_x = 11.9;           // LoS-probability environment constants
  double env_y = 0.13;           // (degree-domain)
  double noise_power_w = 3.1622776601683796e-14;  // -105 dBm
  double tx_power_uav_w = 0.1;                    // 20 dBm
  double tx_power_sbs_w = 1.0;                    // 30 dBm
  double tx_power_user_w = 0.1;                   // 20 dBm

  void validate() const;
};

struct Bandwidths {
  double backhaul_down_hz = 2e9;    // B^VD
  double backhaul_up_hz = 500e6;    // B^VU
  double access_down_hz = 16e6;     // B^SD
  double access_up_hz = 4e6;        // B^SU

  void validate() const;
};

/// Per-link averages. Capacities are per associated user (the serving
/// bandwidth is split evenly across the U_j users of the SBS).
struct LinkBudget {
  double avg_path_loss_db = 0.0;
  double avg_snr_linear = 0.0;
  double capacity_bps_per_user = 0.0;
};

struct BackhaulBudget {
  LinkBudget down;  // UAV -> SBS content link (mmWave)
  LinkBudget up;    // SBS -> UAV tracking link (sub-6GHz)
};

/// Free-space reference loss 20*log10(d0 * fc * 4*pi / c) in dB.
double free_space_loss(const RadioParams& params);

/// Log-normal shadowing loss at `distance_m` for a LoS or NLoS mmWave link.
/// `shadow_sample_db` is the shadowing realization; pass 0 for the
/// expected-value budget. Throws std::domain_error below the reference
/// distance.
double mmwave_path_loss(const RadioParams& params, double distance_m, bool los,
                        double shadow_sample_db);

/// Sub-6GHz distance-law loss in dB; NLoS adds 10*log10(eta).
double sub6_path_loss(const RadioParams& params, double distance_m, bool los);

/// Elevation-angle LoS probability, angle in degrees from the slant path.
double los_probability(const RadioParams& params, const Node& uav, const Node& ground);

/// LoS/NLoS mixture of the mmWave loss at zero shadowing.
double average_path_loss(const RadioParams& params, const Node& uav, const Node& ground);

/// Per-user capacities of both backhaul directions for an SBS with
/// `users_at_sbs` associated users.
BackhaulBudget backhaul_capacity_per_user(const RadioParams& params,
                                          const Bandwidths& bw, const Node& uav,
                                          const Node& sbs, int users_at_sbs);

/// SBS<->user channel gains h_ij for a (user, SBS) grid. The model behind
/// the paper-level equations is injectable so tests can pin constants.
class ChannelGainModel {
 public:
  ChannelGainModel(int n_users, int n_sbs);

  void set(int user, int sbs, double gain);
  double at(int user, int sbs) const;  // throws ConfigError when unset
  int n_users() const { return n_users_; }
  int n_sbs() const { return n_sbs_; }

  /// d^-beta path gain times unit-mean Rayleigh power fading. The fading
  /// draw is keyed on (seed, slot, user, sbs) so results do not depend on
  /// evaluation order.
  static ChannelGainModel distance_rayleigh(const RadioParams& params,
                                            std::span<const Node> users,
                                            std::span<const Node> sbs,
                                            std::uint64_t seed, std::uint64_t slot);

  /// Fading-free d^-beta gains (used by expectation-style tests).
  static ChannelGainModel distance_only(const RadioParams& params,
                                        std::span<const Node> users,
                                        std::span<const Node> sbs);

 private:
  int n_users_;
  int n_sbs_;
  std::vector<double> gain_;  // NaN = unset
};

struct AccessBudget {
  double down_bps = 0.0;  // c^SD, SBS j -> user i
  double up_bps = 0.0;    // c^SU, user i -> SBS j
};

/// SINR-based access capacities. Downlink interference sums over all other
/// SBSs, uplink over all other users; bandwidth is split across the
/// serving SBS's users.
AccessBudget access_capacity(const RadioParams& params, const Bandwidths& bw,
                             int sbs_index, int user_index, int n_sbs, int n_users,
                             const ChannelGainModel& gains, int users_at_sbs);

}  // namespace elsm::channel
