#include "elsm/esn.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <istream>
#include <ostream>

#include "elsm/rng.hpp"

namespace elsm::reservoir {

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

EsnState build_esn(const EsnConfig& config, std::uint64_t seed) {
  config.validate();
  EsnState esn;
  esn.config = config;

  Rng rng(Rng::key(seed, 0x65736eULL));
  esn.input_weights.resize(config.reservoir_size, config.input_dim);
  for (int r = 0; r < esn.input_weights.rows(); ++r) {
    for (int c = 0; c < esn.input_weights.cols(); ++c) {
      esn.input_weights(r, c) = config.input_scaling * rng.uniform(-1.0, 1.0);
    }
  }

  esn.recurrent_weights.resize(config.reservoir_size, config.reservoir_size);
  for (int r = 0; r < esn.recurrent_weights.rows(); ++r) {
    for (int c = 0; c < esn.recurrent_weights.cols(); ++c) {
      esn.recurrent_weights(r, c) = rng.uniform(-1.0, 1.0);
    }
  }
  const double rho = spectral_radius(esn.recurrent_weights);
  if (rho > 0.0) esn.recurrent_weights *= config.spectral_radius / rho;

  esn.output_weights =
      Eigen::MatrixXd::Zero(config.output_dim, config.reservoir_size + config.input_dim);
  esn.state = Eigen::VectorXd::Zero(config.reservoir_size);
  return esn;
}

void update_reservoir(EsnState& esn, const Eigen::VectorXd& trajectory) {
  if (trajectory.size() != esn.config.input_dim) {
    throw ConfigError("reservoir input dimension mismatch");
  }
  esn.state = (esn.recurrent_weights * esn.state + esn.input_weights * trajectory)
                  .array()
                  .tanh();
}

Eigen::VectorXd predict(const EsnState& esn, const Eigen::VectorXd& trajectory) {
  if (trajectory.size() != esn.config.input_dim) {
    throw ConfigError("readout input dimension mismatch");
  }
  Eigen::VectorXd concat(esn.config.reservoir_size + esn.config.input_dim);
  concat << esn.state, trajectory;
  return esn.output_weights * concat;
}

double predict_one(const EsnState& esn, int action_index,
                   const Eigen::VectorXd& trajectory) {
  if (trajectory.size() != esn.config.input_dim) {
    throw ConfigError("readout input dimension mismatch");
  }
  if (action_index < 0 || action_index >= esn.config.output_dim) {
    throw ConfigError("predict_one: action index out of range");
  }
  const auto row = esn.output_weights.row(action_index);
  return row.head(esn.config.reservoir_size).dot(esn.state) +
         row.tail(esn.config.input_dim).dot(trajectory);
}

void train_step(EsnState& esn, int action_index, double observed_reliability,
                double predicted) {
  if (action_index < 0 || action_index >= esn.config.output_dim) {
    throw ConfigError("train_step: action index out of range");
  }
  esn.train_steps += 1;
  double lr = esn.config.learning_rate;
  if (esn.config.learning_rate_decay) {
    lr /= std::sqrt(static_cast<double>(esn.train_steps));
  }
  const double error = observed_reliability - predicted;
  esn.output_weights.row(action_index).head(esn.config.reservoir_size) +=
      lr * error * esn.state.transpose();
}

void EsnState::save(std::ostream& os) const {
  os.precision(17);
  os << state.size() << ' ' << output_weights.rows() << ' ' << output_weights.cols()
     << ' ' << train_steps << '\n';
  for (int i = 0; i < state.size(); ++i) os << state(i) << ' ';
  os << '\n';
  for (int r = 0; r < output_weights.rows(); ++r) {
    for (int c = 0; c < output_weights.cols(); ++c) os << output_weights(r, c) << ' ';
    os << '\n';
  }
}

void EsnState::load(std::istream& is) {
  long long n = 0, rows = 0, cols = 0;
  is >> n >> rows >> cols >> train_steps;
  if (n != state.size() || rows != output_weights.rows() || cols != output_weights.cols()) {
    throw ConfigError("ESN checkpoint shape mismatch");
  }
  for (int i = 0; i < state.size(); ++i) is >> state(i);
  for (int r = 0; r < output_weights.rows(); ++r) {
    for (int c = 0; c < output_weights.cols(); ++c) is >> output_weights(r, c);
  }
  if (!is) throw ConfigError("truncated ESN checkpoint");
}

}  // namespace elsm::reservoir
