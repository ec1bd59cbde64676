#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elsm/experiment.hpp"

namespace fs = std::filesystem;
using namespace elsm;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
  if (!os) throw std::runtime_error("failed to write " + path.string());
}

struct SweepSpec {
  sim::SweepAxis axis;
  std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) {
    throw CLI::ValidationError("--sweep expects AXIS=v1,v2,...");
  }
  SweepSpec spec{sim::sweep_axis_from_string(arg.substr(0, eq)), {}};
  std::stringstream vals(arg.substr(eq + 1));
  std::string tok;
  while (std::getline(vals, tok, ',')) {
    if (!tok.empty()) spec.values.push_back(std::stod(tok));
  }
  if (spec.values.empty()) throw CLI::ValidationError("--sweep has no values");
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless VR delivery simulator with reservoir-learning agents"};

  std::string config_path;
  std::uint64_t seed = 1;
  std::string algorithm = "elsm";
  int iterations = -1;
  std::string sweep_arg;
  std::string output_dir = ".";

  app.add_option("--config", config_path, "key=value run configuration file");
  app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--algorithm", algorithm, "one of elsm|esn|qlearning|elsm-random-cache|elsm-random-format")
      ->check(CLI::IsMember({"elsm", "esn", "qlearning", "elsm-random-cache",
                             "elsm-random-format"}));
  app.add_option("--iterations", iterations, "override the configured horizon");
  app.add_option("--sweep", sweep_arg, "AXIS=v1,v2,... with AXIS in SBS_count|backhaul_bw|cache_size");
  app.add_option("--output", output_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    sim::SimConfig cfg;
    if (!config_path.empty()) cfg = sim::load_config_file(config_path);
    if (iterations >= 0) cfg.horizon = iterations;
    cfg.validate();

    const auto alg = sim::algorithm_from_string(algorithm);
    fs::create_directories(output_dir);
    const fs::path out(output_dir);

    if (!sweep_arg.empty()) {
      const auto spec = parse_sweep(sweep_arg);
      const auto rows = sim::sweep(cfg, spec.axis, spec.values, {alg}, seed);
      std::ofstream os(out / "sweep.csv");
      sim::write_sweep_csv(os, rows);
      if (!os) throw std::runtime_error("failed writing sweep.csv");
      write_file(out / "sweep.gp", sim::gnuplot_sweep_script("sweep.csv"));
      if (sim::log_level() > 0) {
        std::cerr << "wrote " << rows.size() << " sweep rows to "
                  << (out / "sweep.csv") << "\n";
      }
      return 0;
    }

    long long frames_written = 0;
    const auto result = sim::run_experiment(cfg, seed, alg);
    {
      std::ofstream os(out / "metrics.csv");
      sim::write_metrics_csv(os, result.frames);
      frames_written = static_cast<long long>(result.frames.size());
      if (!os) {
        throw std::runtime_error("metrics.csv write failed after frame " +
                                 std::to_string(frames_written));
      }
    }
    {
      std::ofstream os(out / "cdf.csv");
      sim::write_cdf_csv(os, sim::emit_cdf(result.user_reliability));
      if (!os) throw std::runtime_error("failed writing cdf.csv");
    }
    write_file(out / "metrics.gp", sim::gnuplot_metrics_script("metrics.csv"));
    write_file(out / "cdf.gp", sim::gnuplot_cdf_script("cdf.csv"));

    if (sim::log_level() > 0) {
      std::cerr << "algorithm=" << algorithm << " seed=" << seed
                << " network_total=" << result.network_total
                << " converged_total=" << result.converged_total
                << " eq1_violations=" << result.eq1_violations << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
