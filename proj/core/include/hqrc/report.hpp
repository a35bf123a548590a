#pragma once

// CSV/JSON emission of run summaries and readout-model records.

#include <string>
#include <vector>

#include "hqrc/experiment.hpp"

namespace hqrc {

/// One row per run: config_hash, label, seed, mode, vpt, vpt_index,
/// censored, attractor_fraction, return_map_fraction, reservoir_size,
/// wall_seconds, error, then the run's key hyperparameters.
void write_summaries_csv(const std::string& path, const std::vector<RunSummary>& runs);

/// Full nested summaries (trajectories excluded) as a JSON array.
std::string summaries_to_json(const std::vector<RunSummary>& runs);
std::vector<RunSummary> summaries_from_json(const std::string& text);
void write_summaries_json(const std::string& path, const std::vector<RunSummary>& runs);
std::vector<RunSummary> read_summaries_json(const std::string& path);

/// Box statistics per config: label, config_hash, n, failures, mean,
/// median, q1, q3, iqr, whisker_lo, whisker_hi, min, max.
void write_aggregate_csv(const std::string& path, const std::vector<CellAggregate>& cells);

/// Columns t, truth_<c>..., pred_<c>... in raw units. Requires a run
/// made with keep_trajectories.
void write_run_trajectory_csv(const std::string& path, const RunSummary& run,
                              const std::vector<std::string>& names);

std::string model_to_json(const ModelRecord& record);
ModelRecord model_from_json(const std::string& text);
void save_model(const std::string& path, const ModelRecord& record);
ModelRecord load_model(const std::string& path);

}  // namespace hqrc
