#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "elsm/errors.hpp"

namespace elsm::reservoir {

/// Construction parameters of the 3D leaky integrate-and-fire column.
/// Synapses between neurons i, j exist with probability
/// varsigma(type_i, type_j) * exp(-(dist_ij / lambda)^2).
struct LiquidConfig {
  int l1 = 5, l2 = 5, l3 = 5;
  double excitatory_fraction = 0.8;
  double varsigma_ee = 0.3;
  double varsigma_ei = 0.2;
  double varsigma_ie = 0.4;
  double varsigma_ii = 0.1;
  double length_scale = 2.0;  // lambda
  double input_connect_prob = 0.3;

  double membrane_tau_slots = 30.0;
  double threshold = 1.0;
  double reset_potential = 0.0;
  int refractory_slots = 2;

  double synapse_weight_exc = 2.0;
  double synapse_weight_inh = 1.0;  // applied with negative sign
  double input_current_scale = 4.0;
  int input_levels = 256;  // policy indices are encoded as (idx+1)/input_levels

  int slots_per_period = 10;  // N_tau
  bool spike_count_output = false;  // emit spike flags instead of membranes

  int neuron_count() const { return l1 * l2 * l3; }
  void validate() const;
};

/// A built liquid: fixed topology plus the evolving membrane state.
/// Topology is fully determined by (config, seed), so checkpoints only
/// carry the dynamic state.
class LiquidState {
 public:
  LiquidState(const LiquidConfig& config, int n_inputs, std::uint64_t seed);

  int n_neurons() const { return static_cast<int>(membrane_.size()); }
  int n_inputs() const { return static_cast<int>(input_taps_.size()); }
  int output_dim() const { return config_.slots_per_period * n_neurons(); }

  bool is_excitatory(int neuron) const { return excitatory_[neuron] != 0; }
  const std::vector<std::pair<int, double>>& synapses_of(int neuron) const {
    return synapses_[neuron];
  }
  bool input_tapped(int input, int neuron) const {
    return input_taps_[input][neuron] != 0;
  }
  double membrane(int neuron) const { return membrane_[neuron]; }

  /// Advances one period of slots under constant policy-index drive and
  /// returns the concatenated per-slot state vector (membranes by default).
  std::vector<double> step_period(const std::vector<int>& policy_indices);

  void reset_dynamics();
  void save(std::ostream& os) const;
  void load(std::istream& is);

 private:
  void step_slot(const std::vector<double>& input_current, std::vector<double>& out,
                 int slot_in_period);

  LiquidConfig config_;
  std::vector<std::uint8_t> excitatory_;
  std::vector<std::vector<std::pair<int, double>>> synapses_;  // outgoing (target, weight)
  std::vector<std::vector<std::uint8_t>> input_taps_;          // [input][neuron]

  std::vector<double> membrane_;
  std::vector<int> refractory_left_;
  std::vector<std::uint8_t> spiked_;       // spikes fired in the last slot
  std::vector<double> pending_synaptic_;   // input arriving next slot
};

/// Analytic first-spike slot of an isolated LIF neuron under constant
/// drive; test oracle for the simulated dynamics.
int lif_first_spike_slot(double tau_slots, double threshold, double drive);

}  // namespace elsm::reservoir
