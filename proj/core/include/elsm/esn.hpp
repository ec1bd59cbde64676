#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>

#include "elsm/errors.hpp"

namespace elsm::reservoir {

/// Echo-state readout sitting on top of the liquid trajectory. Only the
/// output weights train; the input and recurrent matrices stay fixed at
/// construction, with the recurrent matrix rescaled below unit spectral
/// radius so the state contracts onto the input history.
struct EsnConfig {
  int reservoir_size = 100;  // N_W
  int input_dim = 1250;      // liquid trajectory length (N_L * N_tau)
  int output_dim = 1;        // N_O, one readout per action
  double spectral_radius = 0.9;
  double input_scaling = 0.1;
  double learning_rate = 0.01;  // lambda^alpha
  bool learning_rate_decay = false;  // optional 1/sqrt(t) schedule

  void validate() const {
    if (reservoir_size < 1 || input_dim < 1 || output_dim < 1) {
      throw ConfigError("ESN dimensions must be positive");
    }
    if (!(spectral_radius > 0.0)) throw ConfigError("spectral radius must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  }
};

struct EsnState {
  EsnConfig config;
  Eigen::MatrixXd input_weights;      // N_W x input_dim
  Eigen::MatrixXd recurrent_weights;  // N_W x N_W, spectral radius = target
  Eigen::MatrixXd output_weights;     // N_O x (N_W + input_dim), zero-initialized
  Eigen::VectorXd state;              // reservoir activations, N_W
  long long train_steps = 0;

  void save(std::ostream& os) const;  // dynamic part only (state + readout)
  void load(std::istream& is);
};

/// Dense uniform matrices; recurrent weights rescaled so their spectral
/// radius equals the configured target.
EsnState build_esn(const EsnConfig& config, std::uint64_t seed);

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

/// state <- tanh(W state + W_in trajectory)
void update_reservoir(EsnState& esn, const Eigen::VectorXd& trajectory);

/// Linear readout over [state; trajectory]; one estimate per action.
Eigen::VectorXd predict(const EsnState& esn, const Eigen::VectorXd& trajectory);

/// Single readout row; avoids the full matrix product in per-slot loops.
double predict_one(const EsnState& esn, int action_index,
                   const Eigen::VectorXd& trajectory);

/// LMS update of the taken action's readout row against the realized
/// reliability; touches only the reservoir-state block of that row.
void train_step(EsnState& esn, int action_index, double observed_reliability,
                double predicted);

}  // namespace elsm::reservoir
