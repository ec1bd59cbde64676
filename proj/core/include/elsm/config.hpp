#pragma once

#include <iosfwd>
#include <string>

#include "elsm/agent.hpp"
#include "elsm/channel.hpp"
#include "elsm/content.hpp"
#include "elsm/esn.hpp"
#include "elsm/latency.hpp"
#include "elsm/liquid.hpp"

namespace elsm::sim {

/// Flat key=value run configuration. Defaults reproduce the reference
/// parameter table; every key can be overridden from a config file.
/// Unknown keys are hard errors.
struct SimConfig {
  // geometry and population
  double r_m = 500.0;
  int u = 20;
  int v = 5;
  int b = 5;
  int c_k = 3;
  double uav_alt_m = 100.0;
  double sbs_h_m = 10.0;
  double user_h_m = 1.5;

  // radio constants
  double f_c_ghz = 38.0;
  double d0_m = 5.0;
  double mu_los = 2.0;
  double mu_nlos = 2.4;
  double sigma_los_db = 5.3;
  double sigma_nlos_db = 5.27;
  double beta = 2.0;
  double eta = 100.0;
  double x = 11.9;
  double y = 0.13;
  double noise_dbm = -105.0;
  double p_v_dbm = 20.0;
  double p_b_dbm = 30.0;
  double p_u_dbm = 20.0;
  double b_vd_ghz = 2.0;
  double b_vu_mhz = 500.0;
  double b_sd_mhz = 16.0;
  double b_su_mhz = 4.0;

  // compute and content
  double r_u_gbits = 1.0;
  double r_s_gbits = 2.0;
  int uav_compute_shared = 1;
  double g_360_mbits = 50.0;
  double g_120_mbits = 12.5;
  double a_kbits = 50.0;
  double h_mbits = 50.0;
  double d_ms = 20.0;
  double s_mbits = 300.0;
  double rho_ms = 30.0;  // listed in the parameter table; not consumed anywhere

  // workload and run length
  double zipf_s = 1.0;
  int zipf_rotate_slots = 0;  // >0: popularity ranking cycles at this cadence
  int zipf_rotate_stride = 1;
  int horizon = 3000;
  int n_tau = 10;

  // liquid column
  int l1 = 5, l2 = 5, l3 = 5;
  double exc_frac = 0.8;
  double p_in = 0.3;
  double liquid_lambda = 2.0;
  double vs_ee = 0.3, vs_ei = 0.2, vs_ie = 0.4, vs_ii = 0.1;
  double lif_tau = 30.0, lif_thresh = 1.0, lif_reset = 0.0;
  int lif_refrac = 2;
  double liquid_w_exc = 2.0, liquid_w_inh = 1.0, liquid_in_scale = 4.0;
  int phi_spikes = 0;

  // echo-state readout
  int n_w = 100;
  double esn_rho = 0.9;
  double esn_input_scale = 0.1;
  double lambda_alpha = 0.01;
  int lambda_alpha_decay = 0;

  // agents
  double kappa = 5.0;
  int action_cap = 256;
  int k_nearest = 2;
  std::string action_mode = "auto";    // auto | o | oprime
  std::string cache_search = "exact";  // exact | greedy
  double q_alpha = 0.1;
  double q_eps0 = 1.0;
  double q_eps_min = 0.05;
  double q_eps_decay = 0.995;
  int n_seeds = 10;

  void validate() const;

  // conversions into the module-level parameter structs
  channel::RadioParams radio_params() const;
  channel::Bandwidths bandwidths() const;
  latency::ComputeBudget compute_budget() const;
  content::ContentCatalog catalog() const;
  reservoir::LiquidConfig liquid_config() const;
  reservoir::EsnConfig esn_config() const;
  agent::LearnerConfig learner_config() const;
  double deadline_s() const;
  double cache_capacity_bits() const;
  int slots_total() const { return horizon * n_tau; }
  agent::ActionMode resolved_action_mode() const;
};

SimConfig parse_config(std::istream& is);
SimConfig load_config_file(const std::string& path);
void serialize_config(const SimConfig& cfg, std::ostream& os);
bool operator==(const SimConfig& a, const SimConfig& b);

}  // namespace elsm::sim
