#include <cmath>
#include <sstream>

#include "doctest.h"
#include "elsm/esn.hpp"
#include "elsm/rng.hpp"

using namespace elsm;
using namespace elsm::reservoir;

namespace {

EsnConfig small_config() {
  EsnConfig c;
  c.reservoir_size = 40;
  c.input_dim = 30;
  c.output_dim = 4;
  return c;
}

Eigen::VectorXd random_vec(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

// Growth-rate estimate of the largest eigenvalue modulus, independent of
// the eigensolver used inside the library.
double power_growth_estimate(const Eigen::MatrixXd& m, int warmup, int window) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(m.cols());
  for (int i = 0; i < warmup; ++i) {
    x = m * x;
    x /= x.norm();
  }
  double log_growth = 0.0;
  for (int i = 0; i < window; ++i) {
    x = m * x;
    const double n = x.norm();
    log_growth += std::log(n);
    x /= n;
  }
  return std::exp(log_growth / window);
}

}  // namespace

TEST_CASE("recurrent weights are scaled to the target spectral radius") {
  auto esn = build_esn(small_config(), 7);
  CHECK(std::abs(spectral_radius(esn.recurrent_weights) - 0.9) < 1e-6);
  CHECK(std::abs(power_growth_estimate(esn.recurrent_weights, 200, 2000) - 0.9) < 2e-3);
}

TEST_CASE("zero output weights predict the zero vector") {
  auto esn = build_esn(small_config(), 3);
  Rng rng(1);
  auto y = predict(esn, random_vec(rng, 30));
  CHECK(y.size() == 4);
  for (int i = 0; i < y.size(); ++i) CHECK(y(i) == 0.0);
}

TEST_CASE("same seed reproduces the matrices bit for bit") {
  auto a = build_esn(small_config(), 12);
  auto b = build_esn(small_config(), 12);
  CHECK(a.input_weights == b.input_weights);
  CHECK(a.recurrent_weights == b.recurrent_weights);
}

TEST_CASE("zero state and zero input stay at zero") {
  auto esn = build_esn(small_config(), 5);
  update_reservoir(esn, Eigen::VectorXd::Zero(30));
  CHECK(esn.state.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one step from rest is the squashed input projection") {
  auto esn = build_esn(small_config(), 9);
  Rng rng(2);
  const auto phi = random_vec(rng, 30);
  const Eigen::VectorXd expected = (esn.input_weights * phi).array().tanh();
  update_reservoir(esn, phi);
  CHECK((esn.state - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("twin trajectories contract under the same drive") {
  auto config = small_config();
  Rng rng(3);
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    auto a = build_esn(config, seed);
    auto b = build_esn(config, seed);
    a.state = random_vec(rng, config.reservoir_size);
    b.state = random_vec(rng, config.reservoir_size);
    double dist = (a.state - b.state).norm();
    REQUIRE(dist > 0.1);
    for (int step = 0; step < 500; ++step) {
      const auto phi = random_vec(rng, config.input_dim);
      update_reservoir(a, phi);
      update_reservoir(b, phi);
    }
    dist = (a.state - b.state).norm();
    CHECK(dist < 1e-6);
  }
}

TEST_CASE("an expanding recurrent matrix does not contract") {
  auto config = small_config();
  config.spectral_radius = 1.5;
  Rng rng(4);
  auto a = build_esn(config, 20);
  auto b = build_esn(config, 20);
  a.state = random_vec(rng, config.reservoir_size);
  b.state = random_vec(rng, config.reservoir_size);
  for (int step = 0; step < 500; ++step) {
    const auto phi = random_vec(rng, config.input_dim);
    update_reservoir(a, phi);
    update_reservoir(b, phi);
  }
  CHECK((a.state - b.state).norm() > 1e-3);
}

TEST_CASE("readout rows select reservoir coordinates") {
  auto esn = build_esn(small_config(), 6);
  Rng rng(5);
  esn.state = random_vec(rng, 40);
  esn.output_weights(2, 0) = 1.0;  // one-hot on state coordinate 0
  auto y = predict(esn, Eigen::VectorXd::Zero(30));
  CHECK(y(2) == doctest::Approx(esn.state(0)).epsilon(1e-15));
  CHECK(y(0) == 0.0);
}

TEST_CASE("training is a no-op at zero error and touches one row otherwise") {
  auto esn = build_esn(small_config(), 8);
  Rng rng(6);
  esn.state = random_vec(rng, 40);

  const auto before = esn.output_weights;
  train_step(esn, 1, 0.5, 0.5);
  CHECK(esn.output_weights == before);

  train_step(esn, 1, 1.0, 0.25);
  for (int r = 0; r < esn.output_weights.rows(); ++r) {
    if (r == 1) continue;
    CHECK(esn.output_weights.row(r) == before.row(r));
  }
  CHECK(esn.output_weights.row(1) != before.row(1));
}

TEST_CASE("a unit reservoir state bumps exactly one coefficient by the error") {
  auto config = small_config();
  config.learning_rate = 1.0;
  auto esn = build_esn(config, 9);
  esn.state = Eigen::VectorXd::Zero(40);
  esn.state(7) = 1.0;
  train_step(esn, 3, 0.8, 0.3);
  CHECK(esn.output_weights(3, 7) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(esn.output_weights.row(3).cwiseAbs().sum() == doctest::Approx(0.5));
}

TEST_CASE("repeated updates on a fixed state converge geometrically") {
  auto config = small_config();
  config.learning_rate = 0.02;
  auto esn = build_esn(config, 10);
  Rng rng(7);
  esn.state = random_vec(rng, 40);
  const auto phi = Eigen::VectorXd::Zero(30);
  const double target = 3.0;
  const double contraction = 1.0 - config.learning_rate * esn.state.squaredNorm();
  REQUIRE(std::abs(contraction) < 1.0);  // LMS stability condition

  double prev_error = target - predict(esn, phi)(0);
  for (int step = 0; step < 200; ++step) {
    const double y = predict(esn, phi)(0);
    train_step(esn, 0, target, y);
    const double err = target - predict(esn, phi)(0);
    if (std::abs(prev_error) > 1e-12) {
      CHECK(err == doctest::Approx(prev_error * contraction).epsilon(1e-9));
    }
    prev_error = err;
  }
  // geometric decay down to floating-point noise
  CHECK(std::abs(prev_error) < 1e-10);
}

TEST_CASE("dimension mismatches are rejected") {
  auto esn = build_esn(small_config(), 11);
  CHECK_THROWS_AS(update_reservoir(esn, Eigen::VectorXd::Zero(29)), ConfigError);
  CHECK_THROWS_AS(predict(esn, Eigen::VectorXd::Zero(31)), ConfigError);
  CHECK_THROWS_AS(train_step(esn, 4, 0.0, 0.0), ConfigError);
}

TEST_CASE("dynamic state round-trips through a checkpoint") {
  auto esn = build_esn(small_config(), 13);
  Rng rng(8);
  for (int i = 0; i < 5; ++i) {
    const auto phi = random_vec(rng, 30);
    update_reservoir(esn, phi);
    train_step(esn, i % 4, rng.uniform(0, 4), predict(esn, phi)(i % 4));
  }

  std::stringstream ck;
  esn.save(ck);
  auto restored = build_esn(small_config(), 13);
  restored.load(ck);

  const auto phi = random_vec(rng, 30);
  update_reservoir(esn, phi);
  update_reservoir(restored, phi);
  CHECK(esn.state == restored.state);
  CHECK(esn.output_weights == restored.output_weights);
  CHECK(esn.train_steps == restored.train_steps);
}
