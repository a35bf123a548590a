#include "hqrc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hqrc/error.hpp"

namespace hqrc {

double rmse_at(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth,
               const Eigen::VectorXd& sigma) {
  if (pred.size() != truth.size() || sigma.size() != truth.size()) {
    throw UsageError("rmse_at: dimension mismatch");
  }
  if ((sigma.array() <= 0.0).any()) throw ConfigError("rmse_at: sigma components must be positive");
  const Eigen::ArrayXd z = (pred - truth).array() / sigma.array();
  return std::sqrt(z.square().mean());
}

Eigen::VectorXd component_std(const Trajectory& traj) {
  if (traj.length() == 0) throw UsageError("component_std: empty trajectory");
  const Eigen::VectorXd mean = traj.points.rowwise().mean();
  const Eigen::MatrixXd centered = traj.points.colwise() - mean;
  return (centered.array().square().rowwise().sum() / static_cast<double>(traj.length()))
      .sqrt()
      .matrix();
}

std::vector<double> rmse_series(const Trajectory& pred, const Trajectory& truth,
                                const Eigen::VectorXd& sigma) {
  if (pred.length() != truth.length() || pred.dim() != truth.dim()) {
    throw UsageError("rmse_series: trajectories differ in shape");
  }
  std::vector<double> out(static_cast<std::size_t>(pred.length()));
  for (Eigen::Index k = 0; k < pred.length(); ++k) {
    out[static_cast<std::size_t>(k)] = rmse_at(pred.points.col(k), truth.points.col(k), sigma);
  }
  return out;
}

VptResult vpt(const Trajectory& pred, const Trajectory& truth, const VptConfig& cfg) {
  if (pred.length() != truth.length() || pred.dim() != truth.dim()) {
    throw UsageError("vpt: prediction and truth must have the same shape");
  }
  if (std::abs(pred.dt - truth.dt) > 1e-12 * std::max(1.0, std::abs(truth.dt))) {
    throw UsageError("vpt: prediction and truth use different dt");
  }
  if (!(cfg.epsilon > 0.0)) throw ConfigError("vpt: epsilon must be positive");
  const Eigen::VectorXd sigma = cfg.sigma.size() ? cfg.sigma : component_std(truth);

  VptResult res;
  for (Eigen::Index k = 0; k < pred.length(); ++k) {
    const double e = rmse_at(pred.points.col(k), truth.points.col(k), sigma);
    // NaN counts as a breach.
    if (!(e < cfg.epsilon)) {
      res.index = static_cast<std::size_t>(k);
      res.time = truth.dt * static_cast<double>(k);
      return res;
    }
  }
  res.index = static_cast<std::size_t>(pred.length());
  res.time = truth.dt * static_cast<double>(pred.length());
  res.censored = true;
  return res;
}

std::vector<std::size_t> local_maxima(std::span<const double> s) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    if (s[k - 1] < s[k] && s[k] >= s[k + 1]) idx.push_back(k);
  }
  return idx;
}

std::vector<ReturnPair> poincare_return_map(std::span<const double> s) {
  const auto idx = local_maxima(s);
  std::vector<ReturnPair> pairs;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) pairs.emplace_back(s[idx[i]], s[idx[i + 1]]);
  return pairs;
}

AttractorOverlap attractor_overlap(const Trajectory& pred, const Trajectory& truth) {
  if (pred.length() == 0 || truth.length() == 0) throw UsageError("attractor_overlap: empty input");
  if (pred.dim() != truth.dim()) throw UsageError("attractor_overlap: dimension mismatch");
  const Eigen::VectorXd lo = truth.points.rowwise().minCoeff();
  const Eigen::VectorXd hi = truth.points.rowwise().maxCoeff();
  const Eigen::VectorXd pad = 0.1 * (hi - lo);
  const Eigen::VectorXd box_lo = lo - pad, box_hi = hi + pad;

  Eigen::Index inside = 0;
  for (Eigen::Index k = 0; k < pred.length(); ++k) {
    const auto p = pred.points.col(k);
    if ((p.array() >= box_lo.array()).all() && (p.array() <= box_hi.array()).all()) ++inside;
  }
  AttractorOverlap out;
  out.fraction_inside = static_cast<double>(inside) / static_cast<double>(pred.length());
  out.pred_mean = pred.points.rowwise().mean();
  out.truth_mean = truth.points.rowwise().mean();
  out.pred_std = component_std(pred);
  out.truth_std = component_std(truth);
  return out;
}

double return_map_overlap(std::span<const ReturnPair> pairs, std::span<const ReturnPair> reference,
                          double margin) {
  if (pairs.empty() || reference.empty()) return 0.0;
  double lo1 = reference[0].first, hi1 = lo1, lo2 = reference[0].second, hi2 = lo2;
  for (const auto& [a, b] : reference) {
    lo1 = std::min(lo1, a);
    hi1 = std::max(hi1, a);
    lo2 = std::min(lo2, b);
    hi2 = std::max(hi2, b);
  }
  const double p1 = margin * (hi1 - lo1), p2 = margin * (hi2 - lo2);
  std::size_t inside = 0;
  for (const auto& [a, b] : pairs) {
    if (a >= lo1 - p1 && a <= hi1 + p1 && b >= lo2 - p2 && b <= hi2 + p2) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(pairs.size());
}

}  // namespace hqrc
