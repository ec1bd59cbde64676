#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "elsm/config.hpp"
#include "elsm/scenario.hpp"

namespace elsm::sim {

enum class Algorithm {
  kElsm,
  kEsn,
  kQLearning,
  kElsmRandomCache,
  kElsmRandomFormat,
};

Algorithm algorithm_from_string(const std::string& name);
std::string algorithm_to_string(Algorithm a);

/// One CSV row per (iteration, SBS). The serialized schema is fixed;
/// the trailing fields are in-memory only and feed the safety re-checks.
struct MetricsFrame {
  int iter = 0;
  int sbs_id = 0;
  double total_reliability = 0.0;  // sum over currently associated users
  int n_visible = 0;
  int n_360 = 0;
  double wall_ms = 0.0;  // fixed at zero: outputs must be bit-reproducible

  int users_at_sbs = 0;
  double cache_occupancy_bits = 0.0;
};

struct RunResult {
  std::vector<MetricsFrame> frames;       // horizon * B entries, iteration-major
  std::vector<double> user_reliability;   // final per-user running reliability
  double network_total = 0.0;             // sum of user_reliability
  double converged_total = 0.0;           // success rate over the last half, summed per user
  std::vector<double> period_success;     // per-period network success fraction
  long long eq1_violations = 0;           // independent storage-constraint re-checks
};

using FrameSink = std::function<void(const MetricsFrame&)>;

/// Runs one (config, seed, algorithm) experiment: synchronous learning
/// rounds over the configured horizon, one frame per SBS per period.
RunResult run_experiment(const SimConfig& cfg, std::uint64_t seed, Algorithm algorithm,
                         const FrameSink& sink = nullptr);

void write_metrics_csv(std::ostream& os, const std::vector<MetricsFrame>& frames);

/// Sorted empirical CDF rows (reliability, cumulative fraction).
std::vector<std::pair<double, double>> emit_cdf(std::vector<double> reliabilities);
void write_cdf_csv(std::ostream& os, const std::vector<std::pair<double, double>>& cdf);

enum class SweepAxis { kSbsCount, kBackhaulBandwidth, kCacheSize };
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepRow {
  double axis_value = 0.0;
  std::string algorithm;
  double mean_total_reliability = 0.0;
  double stderr_mean = 0.0;
  long long eq1_violations = 0;  // summed over the row's runs; not serialized
};

/// Aggregates converged totals over cfg.n_seeds seeds per (axis value,
/// algorithm) pair. Runs execute in parallel across seeds.
std::vector<SweepRow> sweep(const SimConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values,
                            const std::vector<Algorithm>& algorithms,
                            std::uint64_t base_seed);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Convenience gnuplot companions for the three CSV outputs.
std::string gnuplot_metrics_script(const std::string& csv_name);
std::string gnuplot_cdf_script(const std::string& csv_name);
std::string gnuplot_sweep_script(const std::string& csv_name);

/// Log verbosity from the ELSM_LOG environment variable (0 when unset).
/// Affects stderr logging only, never results.
int log_level();

}  // namespace elsm::sim
