#pragma once

// End-to-end runs: truth generation, normalization, training, forecasting
// and scoring, plus grid sweeps over configurations and seeds.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hqrc/config.hpp"
#include "hqrc/metrics.hpp"
#include "hqrc/readout.hpp"

namespace hqrc {

struct RunSummary {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string label;  // sweep cell label, empty for single runs
  std::string mode;
  // Key hyperparameters, flattened for CSV output.
  std::vector<std::pair<std::string, std::string>> params;

  VptResult vpt;
  std::vector<double> rmse;
  std::vector<ReturnPair> return_map_pred;
  std::vector<ReturnPair> return_map_truth;
  double return_map_fraction = 0.0;  // predicted pairs inside the truth pairs' box
  AttractorOverlap overlap;
  std::size_t reservoir_size = 0;
  double normalizer_scale = 1.0;
  double wall_seconds = 0.0;
  std::optional<std::string> error;

  // Normalized units; only filled when trajectories are kept.
  std::optional<Trajectory> truth;
  std::optional<Trajectory> prediction;
  std::optional<ModelRecord> model;
};

/// Raw truth of train_steps + test_steps points (after the transient).
Trajectory generate_truth(const SystemConfig& system);

/// Driver for `cfg` with all randomness derived from `seed`.
std::unique_ptr<ReservoirDriver> make_driver(const ExperimentConfig& cfg, std::uint64_t seed);

/// Full pipeline. Deterministic in (cfg, seed) for exact expectations.
/// Errors propagate with the config hash and seed prepended.
RunSummary run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                          bool keep_trajectories = false);

/// Same, reusing a precomputed raw truth (must match cfg.system).
RunSummary run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, const Trajectory& raw_truth,
                          bool keep_trajectories = false);

struct BoxStats {
  std::size_t n = 0;
  double mean = 0, median = 0, q1 = 0, q3 = 0, iqr = 0;
  double whisker_lo = 0, whisker_hi = 0, min = 0, max = 0;
};

/// Quartiles by linear interpolation; whiskers reach the furthest sample
/// within [Q1 - IQR, Q3 + IQR].
BoxStats box_stats(std::vector<double> values);

struct SweepCell {
  std::string label;
  ExperimentConfig config;
};

struct CellAggregate {
  std::string label;
  std::string config_hash;
  BoxStats vpt;
  std::size_t failures = 0;
};

struct SweepResult {
  std::vector<RunSummary> runs;  // cell-major, seed-minor
  std::vector<CellAggregate> cells;
};

/// Cartesian product of the grid axes, in axis order.
std::vector<SweepCell> expand_grid(const SweepGrid& grid);

/// One RunSummary per (cell, seed); failing runs are recorded, not thrown.
/// Results do not depend on `workers` or scheduling.
SweepResult run_sweep(const SweepGrid& grid, unsigned workers = 1);

/// Runs arbitrary (config, seed) jobs over a worker pool.
std::vector<RunSummary> run_many(const std::vector<std::pair<ExperimentConfig, std::uint64_t>>& jobs,
                                 unsigned workers = 1, bool keep_trajectories = false);

/// Group by config hash (first-seen order) and compute VPT box statistics.
std::vector<CellAggregate> aggregate(const std::vector<RunSummary>& runs);

}  // namespace hqrc
