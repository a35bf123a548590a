#pragma once

// Forecast-quality measures.

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hqrc/dynamics.hpp"

namespace hqrc {

/// sqrt(mean_i ((pred_i - truth_i) / sigma_i)^2). Throws ConfigError if any
/// sigma_i <= 0.
double rmse_at(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth,
               const Eigen::VectorXd& sigma);

/// Per-component (population) standard deviation of a trajectory.
Eigen::VectorXd component_std(const Trajectory& traj);

struct VptConfig {
  double epsilon = 0.3;
  /// Empty: use the standard deviation of the truth segment being scored.
  Eigen::VectorXd sigma;
};

struct VptResult {
  double time = 0.0;
  std::size_t index = 0;  // first step with RMSE >= epsilon (or length)
  bool censored = false;  // never breached within the window
};

/// Time of the first step whose normalized RMSE reaches epsilon. A forecast
/// that never breaches reports dt * length with censored = true.
VptResult vpt(const Trajectory& pred, const Trajectory& truth, const VptConfig& cfg = {});

/// RMSE at every step.
std::vector<double> rmse_series(const Trajectory& pred, const Trajectory& truth,
                                const Eigen::VectorXd& sigma);

using ReturnPair = std::pair<double, double>;

/// Interior indices k with s[k-1] < s[k] >= s[k+1].
std::vector<std::size_t> local_maxima(std::span<const double> series);

/// Consecutive local maxima (z_i, z_{i+1}) in temporal order.
std::vector<ReturnPair> poincare_return_map(std::span<const double> series);

struct AttractorOverlap {
  /// Share of predicted points inside the truth's bounding box, expanded by
  /// 10% of its extent on every side.
  double fraction_inside = 0.0;
  Eigen::VectorXd pred_mean, pred_std, truth_mean, truth_std;
};

AttractorOverlap attractor_overlap(const Trajectory& pred, const Trajectory& truth);

/// Fraction of `pairs` inside the bounding box of `reference` pairs expanded
/// by `margin` of its extent per side. 0 for empty `pairs`.
double return_map_overlap(std::span<const ReturnPair> pairs, std::span<const ReturnPair> reference,
                          double margin = 0.1);

}  // namespace hqrc
