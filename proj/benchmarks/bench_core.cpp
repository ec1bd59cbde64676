#include <benchmark/benchmark.h>

#include "elsm/agent.hpp"
#include "elsm/channel.hpp"
#include "elsm/esn.hpp"
#include "elsm/experiment.hpp"
#include "elsm/liquid.hpp"
#include "elsm/oracle.hpp"

using namespace elsm;

namespace {

oracle::SlotSnapshot bench_snapshot(int n_users, int n_contents) {
  Rng rng(7);
  oracle::SlotSnapshot s;
  s.sbs_count = 5;
  s.deadline_s = 0.02;
  s.cache_capacity_bits = 300e6;
  for (int i = 0; i < n_users; ++i) {
    s.users.push_back({i, static_cast<int>(rng.below(n_contents)),
                       rng.uniform(1e8, 1e10), rng.uniform(1e6, 1e8),
                       rng.uniform(1e8, 1e10), rng.uniform(1e7, 1e9)});
  }
  return s;
}

content::ContentCatalog bench_catalog(int n) {
  std::vector<content::ContentInfo> infos(n);
  for (auto& c : infos) c.uav = 0;
  return content::ContentCatalog(std::move(infos), 50e3);
}

}  // namespace

static void BM_LiquidPeriod(benchmark::State& state) {
  reservoir::LiquidConfig cfg;  // 125 neurons, 10 slots
  reservoir::LiquidState liquid(cfg, 5, 1);
  std::vector<int> x = {3, 17, 9, 250, 41};
  for (auto _ : state) {
    benchmark::DoNotOptimize(liquid.step_period(x));
  }
}
BENCHMARK(BM_LiquidPeriod);

static void BM_EsnSlotUpdate(benchmark::State& state) {
  reservoir::EsnConfig cfg;
  cfg.reservoir_size = 100;
  cfg.input_dim = 1250;
  cfg.output_dim = 64;
  auto esn = reservoir::build_esn(cfg, 1);
  Eigen::VectorXd phi = Eigen::VectorXd::Constant(1250, 0.3);
  for (auto _ : state) {
    reservoir::update_reservoir(esn, phi);
    const double y = reservoir::predict_one(esn, 7, phi);
    reservoir::train_step(esn, 7, 0.8, y);
  }
}
BENCHMARK(BM_EsnSlotUpdate);

static void BM_OptimalCache(benchmark::State& state) {
  const int n_contents = static_cast<int>(state.range(0));
  auto snap = bench_snapshot(12, n_contents);
  auto catalog = bench_catalog(n_contents);
  oracle::FormatDecision decision;
  for (const auto& u : snap.users) decision[u.user] = content::CacheFormat::kVisible;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::optimal_cache(snap, catalog, decision));
  }
}
BENCHMARK(BM_OptimalCache)->Arg(6)->Arg(12)->Arg(15);

static void BM_BruteForceCache(benchmark::State& state) {
  const int n_contents = static_cast<int>(state.range(0));
  auto snap = bench_snapshot(8, n_contents);
  auto catalog = bench_catalog(n_contents);
  oracle::FormatDecision decision;
  for (const auto& u : snap.users) decision[u.user] = content::CacheFormat::kVisible;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::brute_force_cache(snap, catalog, decision));
  }
}
BENCHMARK(BM_BruteForceCache)->Arg(6)->Arg(8);

static void BM_BackhaulBudget(benchmark::State& state) {
  channel::RadioParams params;
  channel::Bandwidths bw;
  channel::Node uav{0, channel::NodeKind::kUav, 120, -40, 100};
  channel::Node sbs{0, channel::NodeKind::kSbs, -60, 80, 10};
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel::backhaul_capacity_per_user(params, bw, uav, sbs, 4));
  }
}
BENCHMARK(BM_BackhaulBudget);

static void BM_ExperimentPeriod(benchmark::State& state) {
  sim::SimConfig cfg;
  cfg.horizon = 1;
  cfg.action_cap = 40;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::run_experiment(cfg, 3, sim::Algorithm::kElsm));
  }
}
BENCHMARK(BM_ExperimentPeriod);

BENCHMARK_MAIN();
