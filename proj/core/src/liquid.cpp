#include "elsm/liquid.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <ostream>

#include "elsm/rng.hpp"

namespace elsm::reservoir {

void LiquidConfig::validate() const {
  if (neuron_count() < 1) throw ConfigError("liquid needs at least one neuron");
  for (double p : {excitatory_fraction, varsigma_ee, varsigma_ei, varsigma_ie,
                   varsigma_ii, input_connect_prob}) {
    if (p < 0.0 || p > 1.0) throw ConfigError("liquid probabilities must lie in [0,1]");
  }
  if (length_scale <= 0) throw ConfigError("length scale must be positive");
  if (membrane_tau_slots <= 1.0) throw ConfigError("membrane tau must exceed one slot");
  if (threshold <= reset_potential) throw ConfigError("threshold must exceed reset");
  if (refractory_slots < 0) throw ConfigError("refractory slots must be non-negative");
  if (slots_per_period < 1) throw ConfigError("period needs at least one slot");
  if (input_levels < 1) throw ConfigError("input levels must be at least 1");
}

LiquidState::LiquidState(const LiquidConfig& config, int n_inputs, std::uint64_t seed)
    : config_(config) {
  config_.validate();
  if (n_inputs < 1) throw ConfigError("liquid needs at least one input line");

  const int n = config_.neuron_count();
  Rng rng(Rng::key(seed, 0x6c697175ULL));

  excitatory_.resize(n);
  for (auto& e : excitatory_) e = rng.bernoulli(config_.excitatory_fraction) ? 1 : 0;

  // Integer-grid positions; connection probability decays with squared
  // Euclidean distance over the length scale.
  auto pos = [&](int idx) {
    const int x = idx % config_.l1;
    const int y = (idx / config_.l1) % config_.l2;
    const int z = idx / (config_.l1 * config_.l2);
    return std::array<int, 3>{x, y, z};
  };

  synapses_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    const auto pi = pos(i);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto pj = pos(j);
      const double dx = pi[0] - pj[0], dy = pi[1] - pj[1], dz = pi[2] - pj[2];
      const double dist2 = dx * dx + dy * dy + dz * dz;
      double vs;
      if (excitatory_[i] && excitatory_[j]) {
        vs = config_.varsigma_ee;
      } else if (excitatory_[i]) {
        vs = config_.varsigma_ei;
      } else if (excitatory_[j]) {
        vs = config_.varsigma_ie;
      } else {
        vs = config_.varsigma_ii;
      }
      const double p =
          vs * std::exp(-dist2 / (config_.length_scale * config_.length_scale));
      if (rng.bernoulli(p)) {
        const double w = excitatory_[i] ? config_.synapse_weight_exc
                                        : -config_.synapse_weight_inh;
        synapses_[i].emplace_back(j, w);
      }
    }
  }

  input_taps_.assign(n_inputs, std::vector<std::uint8_t>(n, 0));
  for (auto& taps : input_taps_) {
    for (auto& t : taps) t = rng.bernoulli(config_.input_connect_prob) ? 1 : 0;
  }

  membrane_.assign(n, config_.reset_potential);
  refractory_left_.assign(n, 0);
  spiked_.assign(n, 0);
  pending_synaptic_.assign(n, 0.0);
}

std::vector<double> LiquidState::step_period(const std::vector<int>& policy_indices) {
  if (static_cast<int>(policy_indices.size()) != n_inputs()) {
    throw ConfigError("liquid input dimension mismatch: got " +
                      std::to_string(policy_indices.size()) + ", expected " +
                      std::to_string(n_inputs()));
  }

  // Constant injection for the whole period; index v drives (v+1)/levels.
  std::vector<double> input_current(n_neurons(), 0.0);
  for (int k = 0; k < n_inputs(); ++k) {
    const double amp = config_.input_current_scale *
                       (policy_indices[k] + 1.0) / config_.input_levels;
    const auto& taps = input_taps_[k];
    for (int nrn = 0; nrn < n_neurons(); ++nrn) {
      if (taps[nrn]) input_current[nrn] += amp;
    }
  }

  std::vector<double> trajectory(output_dim(), 0.0);
  for (int slot = 0; slot < config_.slots_per_period; ++slot) {
    step_slot(input_current, trajectory, slot);
  }
  return trajectory;
}

void LiquidState::step_slot(const std::vector<double>& input_current,
                            std::vector<double>& out, int slot_in_period) {
  const int n = n_neurons();
  // Spikes from the previous slot arrive now.
  std::vector<double> synaptic(std::move(pending_synaptic_));
  pending_synaptic_.assign(n, 0.0);

  for (int i = 0; i < n; ++i) {
    double& v = membrane_[i];
    spiked_[i] = 0;
    if (refractory_left_[i] > 0) {
      --refractory_left_[i];
      v = config_.reset_potential;
    } else {
      const double drive = input_current[i] + synaptic[i];
      v += (drive - v) / config_.membrane_tau_slots;
      if (v >= config_.threshold) {
        spiked_[i] = 1;
        v = config_.reset_potential;
        refractory_left_[i] = config_.refractory_slots;
        for (const auto& [target, w] : synapses_[i]) pending_synaptic_[target] += w;
      }
    }
    out[static_cast<std::size_t>(slot_in_period) * n + i] =
        config_.spike_count_output ? static_cast<double>(spiked_[i]) : v;
  }
}

void LiquidState::reset_dynamics() {
  membrane_.assign(n_neurons(), config_.reset_potential);
  refractory_left_.assign(n_neurons(), 0);
  spiked_.assign(n_neurons(), 0);
  pending_synaptic_.assign(n_neurons(), 0.0);
}

void LiquidState::save(std::ostream& os) const {
  os.precision(17);
  os << n_neurons() << '\n';
  for (int i = 0; i < n_neurons(); ++i) {
    os << membrane_[i] << ' ' << refractory_left_[i] << ' ' << int(spiked_[i]) << ' '
       << pending_synaptic_[i] << '\n';
  }
}

void LiquidState::load(std::istream& is) {
  int n = 0;
  is >> n;
  if (n != n_neurons()) throw ConfigError("liquid checkpoint size mismatch");
  for (int i = 0; i < n; ++i) {
    int spiked = 0;
    is >> membrane_[i] >> refractory_left_[i] >> spiked >> pending_synaptic_[i];
    spiked_[i] = static_cast<std::uint8_t>(spiked);
  }
  if (!is) throw ConfigError("truncated liquid checkpoint");
}

int lif_first_spike_slot(double tau_slots, double threshold, double drive) {
  if (drive <= threshold) return -1;  // never reaches threshold
  // v_t = I * (1 - (1 - 1/tau)^t) >= threshold
  const double a = 1.0 - 1.0 / tau_slots;
  const double t = std::log(1.0 - threshold / drive) / std::log(a);
  return static_cast<int>(std::ceil(t - 1e-12));
}

}  // namespace elsm::reservoir
