#include "elsm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "elsm/units.hpp"

namespace elsm::sim {

namespace {

struct DoubleKey {
  const char* name;
  double SimConfig::*member;
};
struct IntKey {
  const char* name;
  int SimConfig::*member;
};
struct StringKey {
  const char* name;
  std::string SimConfig::*member;
};

const std::vector<DoubleKey>& double_keys() {
  static const std::vector<DoubleKey> keys = {
      {"r_m", &SimConfig::r_m},
      {"uav_alt_m", &SimConfig::uav_alt_m},
      {"sbs_h_m", &SimConfig::sbs_h_m},
      {"user_h_m", &SimConfig::user_h_m},
      {"f_c_ghz", &SimConfig::f_c_ghz},
      {"d0_m", &SimConfig::d0_m},
      {"mu_los", &SimConfig::mu_los},
      {"mu_nlos", &SimConfig::mu_nlos},
      {"sigma_los_db", &SimConfig::sigma_los_db},
      {"sigma_nlos_db", &SimConfig::sigma_nlos_db},
      {"beta", &SimConfig::beta},
      {"eta", &SimConfig::eta},
      {"x", &SimConfig::x},
      {"y", &SimConfig::y},
      {"noise_dbm", &SimConfig::noise_dbm},
      {"p_v_dbm", &SimConfig::p_v_dbm},
      {"p_b_dbm", &SimConfig::p_b_dbm},
      {"p_u_dbm", &SimConfig::p_u_dbm},
      {"b_vd_ghz", &SimConfig::b_vd_ghz},
      {"b_vu_mhz", &SimConfig::b_vu_mhz},
      {"b_sd_mhz", &SimConfig::b_sd_mhz},
      {"b_su_mhz", &SimConfig::b_su_mhz},
      {"r_u_gbits", &SimConfig::r_u_gbits},
      {"r_s_gbits", &SimConfig::r_s_gbits},
      {"g_360_mbits", &SimConfig::g_360_mbits},
      {"g_120_mbits", &SimConfig::g_120_mbits},
      {"a_kbits", &SimConfig::a_kbits},
      {"h_mbits", &SimConfig::h_mbits},
      {"d_ms", &SimConfig::d_ms},
      {"s_mbits", &SimConfig::s_mbits},
      {"rho_ms", &SimConfig::rho_ms},
      {"zipf_s", &SimConfig::zipf_s},
      {"exc_frac", &SimConfig::exc_frac},
      {"p_in", &SimConfig::p_in},
      {"liquid_lambda", &SimConfig::liquid_lambda},
      {"vs_ee", &SimConfig::vs_ee},
      {"vs_ei", &SimConfig::vs_ei},
      {"vs_ie", &SimConfig::vs_ie},
      {"vs_ii", &SimConfig::vs_ii},
      {"lif_tau", &SimConfig::lif_tau},
      {"lif_thresh", &SimConfig::lif_thresh},
      {"lif_reset", &SimConfig::lif_reset},
      {"liquid_w_exc", &SimConfig::liquid_w_exc},
      {"liquid_w_inh", &SimConfig::liquid_w_inh},
      {"liquid_in_scale", &SimConfig::liquid_in_scale},
      {"esn_rho", &SimConfig::esn_rho},
      {"esn_input_scale", &SimConfig::esn_input_scale},
      {"lambda_alpha", &SimConfig::lambda_alpha},
      {"kappa", &SimConfig::kappa},
      {"q_alpha", &SimConfig::q_alpha},
      {"q_eps0", &SimConfig::q_eps0},
      {"q_eps_min", &SimConfig::q_eps_min},
      {"q_eps_decay", &SimConfig::q_eps_decay},
  };
  return keys;
}

const std::vector<IntKey>& int_keys() {
  static const std::vector<IntKey> keys = {
      {"u", &SimConfig::u},
      {"v", &SimConfig::v},
      {"b", &SimConfig::b},
      {"c_k", &SimConfig::c_k},
      {"uav_compute_shared", &SimConfig::uav_compute_shared},
      {"zipf_rotate_slots", &SimConfig::zipf_rotate_slots},
      {"zipf_rotate_stride", &SimConfig::zipf_rotate_stride},
      {"horizon", &SimConfig::horizon},
      {"n_tau", &SimConfig::n_tau},
      {"l1", &SimConfig::l1},
      {"l2", &SimConfig::l2},
      {"l3", &SimConfig::l3},
      {"lif_refrac", &SimConfig::lif_refrac},
      {"phi_spikes", &SimConfig::phi_spikes},
      {"n_w", &SimConfig::n_w},
      {"lambda_alpha_decay", &SimConfig::lambda_alpha_decay},
      {"action_cap", &SimConfig::action_cap},
      {"k_nearest", &SimConfig::k_nearest},
      {"n_seeds", &SimConfig::n_seeds},
  };
  return keys;
}

const std::vector<StringKey>& string_keys() {
  static const std::vector<StringKey> keys = {
      {"action_mode", &SimConfig::action_mode},
      {"cache_search", &SimConfig::cache_search},
  };
  return keys;
}

}  // namespace

void SimConfig::validate() const {
  if (u < 1 || v < 1 || b < 1 || c_k < 1) throw ConfigError("counts must be >= 1");
  if (r_m <= 0) throw ConfigError("area radius must be positive");
  if (!(uav_alt_m > sbs_h_m && sbs_h_m > user_h_m && user_h_m >= 0)) {
    throw ConfigError("expected UAV altitude > SBS height > user height >= 0");
  }
  if (horizon < 0) throw ConfigError("horizon must be non-negative");
  if (n_tau < 1) throw ConfigError("n_tau must be >= 1");
  if (g_120_mbits >= g_360_mbits) throw ConfigError("g_120 must be below g_360");
  if (d_ms <= 0) throw ConfigError("deadline must be positive");
  if (s_mbits < 0) throw ConfigError("cache size must be non-negative");
  if (k_nearest < 1) throw ConfigError("k_nearest must be >= 1");
  if (action_mode != "auto" && action_mode != "o" && action_mode != "oprime") {
    throw ConfigError("action_mode must be auto, o, or oprime");
  }
  if (cache_search != "exact" && cache_search != "greedy") {
    throw ConfigError("cache_search must be exact or greedy");
  }
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  radio_params().validate();
  bandwidths().validate();
  compute_budget().validate();
  liquid_config().validate();
}

channel::RadioParams SimConfig::radio_params() const {
  channel::RadioParams p;
  p.carrier_freq_hz = ghz(f_c_ghz);
  p.ref_distance_m = d0_m;
  p.pl_exp_los = mu_los;
  p.pl_exp_nlos = mu_nlos;
  p.shadow_sigma_los_db = sigma_los_db;
  p.shadow_sigma_nlos_db = sigma_nlos_db;
  p.sub6_pl_exp = beta;
  p.sub6_nlos_atten = eta;
  p.env_x = x;
  p.env_y = y;
  p.noise_power_w = dbm_to_watts(noise_dbm);
  p.tx_power_uav_w = dbm_to_watts(p_v_dbm);
  p.tx_power_sbs_w = dbm_to_watts(p_b_dbm);
  p.tx_power_user_w = dbm_to_watts(p_u_dbm);
  return p;
}

channel::Bandwidths SimConfig::bandwidths() const {
  channel::Bandwidths bw;
  bw.backhaul_down_hz = ghz(b_vd_ghz);
  bw.backhaul_up_hz = mhz(b_vu_mhz);
  bw.access_down_hz = mhz(b_sd_mhz);
  bw.access_up_hz = mhz(b_su_mhz);
  return bw;
}

latency::ComputeBudget SimConfig::compute_budget() const {
  latency::ComputeBudget cb;
  cb.uav_bps = ghz(r_u_gbits);
  cb.sbs_bps = ghz(r_s_gbits);
  cb.uav_shared_across_sbs = uav_compute_shared != 0;
  return cb;
}

content::ContentCatalog SimConfig::catalog() const {
  std::vector<content::ContentInfo> infos;
  for (int k = 0; k < v; ++k) {
    for (int c = 0; c < c_k; ++c) {
      content::ContentInfo info;
      info.uav = k;
      info.size_360_bits = mbits(g_360_mbits);
      info.size_visible_bits = mbits(g_120_mbits);
      info.extract_workload_bits = mbits(h_mbits);
      infos.push_back(info);
    }
  }
  return content::ContentCatalog(std::move(infos), kbits(a_kbits));
}

reservoir::LiquidConfig SimConfig::liquid_config() const {
  reservoir::LiquidConfig lc;
  lc.l1 = l1;
  lc.l2 = l2;
  lc.l3 = l3;
  lc.excitatory_fraction = exc_frac;
  lc.varsigma_ee = vs_ee;
  lc.varsigma_ei = vs_ei;
  lc.varsigma_ie = vs_ie;
  lc.varsigma_ii = vs_ii;
  lc.length_scale = liquid_lambda;
  lc.input_connect_prob = p_in;
  lc.membrane_tau_slots = lif_tau;
  lc.threshold = lif_thresh;
  lc.reset_potential = lif_reset;
  lc.refractory_slots = lif_refrac;
  lc.synapse_weight_exc = liquid_w_exc;
  lc.synapse_weight_inh = liquid_w_inh;
  lc.input_current_scale = liquid_in_scale;
  lc.input_levels = action_cap;
  lc.slots_per_period = n_tau;
  lc.spike_count_output = phi_spikes != 0;
  return lc;
}

reservoir::EsnConfig SimConfig::esn_config() const {
  reservoir::EsnConfig ec;
  ec.reservoir_size = n_w;
  ec.spectral_radius = esn_rho;
  ec.input_scaling = esn_input_scale;
  ec.learning_rate = lambda_alpha;
  ec.learning_rate_decay = lambda_alpha_decay != 0;
  return ec;
}

agent::LearnerConfig SimConfig::learner_config() const {
  agent::LearnerConfig lc;
  lc.kappa = kappa;
  lc.q_alpha = q_alpha;
  lc.q_epsilon0 = q_eps0;
  lc.q_epsilon_min = q_eps_min;
  lc.q_epsilon_decay = q_eps_decay;
  return lc;
}

double SimConfig::deadline_s() const { return ms(d_ms); }
double SimConfig::cache_capacity_bits() const { return mbits(s_mbits); }

agent::ActionMode SimConfig::resolved_action_mode() const {
  if (action_mode == "o") return agent::ActionMode::kCachePlan;
  if (action_mode == "oprime") return agent::ActionMode::kFormatPlan;
  // Cache-composition actions pay off when the store can hold the
  // most-requested content in its cheaper format for an average cell.
  const double avg_users = static_cast<double>(u) / b;
  const double min_cost = std::min(mbits(g_360_mbits), avg_users * mbits(g_120_mbits));
  return cache_capacity_bits() >= min_cost ? agent::ActionMode::kCachePlan
                                           : agent::ActionMode::kFormatPlan;
}

SimConfig parse_config(std::istream& is) {
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto issp = [](unsigned char c) { return std::isspace(c); };
    line.erase(line.begin(), std::find_if_not(line.begin(), line.end(), issp));
    line.erase(std::find_if_not(line.rbegin(), line.rend(), issp).base(), line.end());
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(std::find_if_not(key.rbegin(), key.rend(), issp).base(), key.end());
    value.erase(value.begin(), std::find_if_not(value.begin(), value.end(), issp));

    bool found = false;
    for (const auto& k : double_keys()) {
      if (key == k.name) {
        std::size_t pos = 0;
        cfg.*(k.member) = std::stod(value, &pos);
        if (pos != value.size()) throw ConfigError("bad numeric value for " + key);
        found = true;
        break;
      }
    }
    if (!found) {
      for (const auto& k : int_keys()) {
        if (key == k.name) {
          std::size_t pos = 0;
          cfg.*(k.member) = std::stoi(value, &pos);
          if (pos != value.size()) throw ConfigError("bad integer value for " + key);
          found = true;
          break;
        }
      }
    }
    if (!found) {
      for (const auto& k : string_keys()) {
        if (key == k.name) {
          cfg.*(k.member) = value;
          found = true;
          break;
        }
      }
    }
    if (!found) throw ConfigError("unknown config key: " + key);
  }
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  return parse_config(f);
}

void serialize_config(const SimConfig& cfg, std::ostream& os) {
  os.precision(17);
  for (const auto& k : int_keys()) os << k.name << '=' << cfg.*(k.member) << '\n';
  for (const auto& k : double_keys()) os << k.name << '=' << cfg.*(k.member) << '\n';
  for (const auto& k : string_keys()) os << k.name << '=' << cfg.*(k.member) << '\n';
}

bool operator==(const SimConfig& a, const SimConfig& b) {
  for (const auto& k : double_keys()) {
    if (a.*(k.member) != b.*(k.member)) return false;
  }
  for (const auto& k : int_keys()) {
    if (a.*(k.member) != b.*(k.member)) return false;
  }
  for (const auto& k : string_keys()) {
    if (a.*(k.member) != b.*(k.member)) return false;
  }
  return true;
}

}  // namespace elsm::sim
