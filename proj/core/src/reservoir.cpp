#include "hqrc/reservoir.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hqrc/error.hpp"

namespace hqrc {

double activate(Activation f, double x) {
  switch (f) {
    case Activation::Identity: return x;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Zero: return 0.0;
  }
  return x;
}

Eigen::VectorXd activate(Activation f, const Eigen::VectorXd& x) {
  switch (f) {
    case Activation::Identity: return x;
    case Activation::Tanh: return x.array().tanh().matrix();
    case Activation::Zero: return Eigen::VectorXd::Zero(x.size());
  }
  return x;
}

std::string_view to_string(Activation f) {
  switch (f) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Zero: return "zero";
  }
  return "?";
}

Activation activation_from_string(std::string_view name) {
  if (name == "identity" || name == "id") return Activation::Identity;
  if (name == "tanh") return Activation::Tanh;
  if (name == "zero") return Activation::Zero;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(WeightDistribution d) {
  switch (d) {
    case WeightDistribution::StandardNormal: return "standard-normal";
    case WeightDistribution::Uniform: return "uniform";
    case WeightDistribution::Identity: return "identity";
  }
  return "?";
}

WeightDistribution weight_distribution_from_string(std::string_view name) {
  if (name == "standard-normal" || name == "normal") return WeightDistribution::StandardNormal;
  if (name == "uniform") return WeightDistribution::Uniform;
  if (name == "identity") return WeightDistribution::Identity;
  throw ConfigError("unknown weight distribution '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

double largest_singular_value(const Eigen::MatrixXd& w) {
  if (w.size() == 0) throw ConfigError("largest_singular_value: empty matrix");
  const Eigen::MatrixXd gram = w.transpose() * w;
  const Eigen::Index n = gram.rows();

  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 1.0 / static_cast<double>(i + 2);
  v.normalize();

  double lambda = v.dot(gram * v);
  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::VectorXd gv = gram * v;
    const double norm = gv.norm();
    if (norm == 0.0) return 0.0;
    v = gv / norm;
    gv = gram * v;
    lambda = v.dot(gv);
    if ((gv - lambda * v).norm() <= 1e-10 * std::abs(lambda)) break;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

Eigen::MatrixXd spectral_normalize(const Eigen::MatrixXd& w) {
  const double s = largest_singular_value(w);
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw ConfigError("spectral_normalize: matrix has no positive singular value");
  }
  return w / s;
}

Eigen::MatrixXd draw_matrix(std::size_t rows, std::size_t cols, WeightDistribution dist,
                            std::mt19937_64& rng) {
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  if (dist == WeightDistribution::Identity) {
    if (rows != cols) {
      throw ConfigError("identity weight requested for a " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " matrix");
    }
    return Eigen::MatrixXd::Identity(r, c);
  }
  Eigen::MatrixXd w(r, c);
  if (dist == WeightDistribution::StandardNormal) {
    std::normal_distribution<double> d(0.0, 1.0);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) w(i, j) = d(rng);
  } else {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) w(i, j) = d(rng);
  }
  return spectral_normalize(w);
}

WeightSet generate_weights(const WeightDims& dims, std::uint64_t seed,
                           const WeightDistributions& dists) {
  if (dims.n_res == 0 || dims.n_input == 0) throw ConfigError("weight dims must be positive");
  std::mt19937_64 rng(seed);
  WeightSet ws;
  ws.seed = seed;
  ws.dists = dists;
  for (std::size_t d : dims.encoding_dims) {
    if (d == 0) throw ConfigError("data-encoding layer with zero parameters");
    ws.w_in.push_back(draw_matrix(d, dims.n_input, dists.w_in, rng));
  }
  ws.w_r = draw_matrix(dims.n_res, dims.n_res, dists.w_r, rng);
  if (dims.n_meas > 0) ws.w_m = draw_matrix(dims.n_res, dims.n_meas, dists.w_m, rng);
  ws.w_x = draw_matrix(dims.n_res, dims.n_input, dists.w_x, rng);
  return ws;
}

// ---------------------------------------------------------------------------

namespace {

void check_finite(const Eigen::VectorXd& v, const char* what, std::size_t t) {
  if (!v.allFinite()) {
    throw NumericFault(std::string("non-finite ") + what, static_cast<long>(t));
  }
}

void check_leak(double leak) {
  if (!(leak >= 0.0 && leak <= 1.0)) throw ConfigError("leak rate must lie in [0, 1]");
}

}  // namespace

ReservoirState update_hqrc(const ReservoirState& prev, const Eigen::VectorXd& m,
                           const Eigen::VectorXd& x, const ActivationSet& acts,
                           const WeightSet& weights) {
  check_leak(acts.leak);
  check_finite(m, "measurement vector", prev.t);
  check_finite(x, "input", prev.t);
  if (weights.w_r.cols() != prev.r.size() || weights.w_x.cols() != x.size() ||
      weights.w_m.cols() != m.size() || weights.w_m.rows() != prev.r.size()) {
    throw ConfigError("update_hqrc: dimension mismatch");
  }
  Eigen::VectorXd drive = activate(acts.f_r, Eigen::VectorXd(weights.w_r * prev.r));
  if (acts.f_m != Activation::Zero) drive += activate(acts.f_m, Eigen::VectorXd(weights.w_m * m));
  drive += activate(acts.f_x, Eigen::VectorXd(weights.w_x * x));

  ReservoirState next;
  next.r = (1.0 - acts.leak) * prev.r + acts.leak * activate(acts.g, drive);
  next.t = prev.t + 1;
  return next;
}

ReservoirState update_classical(const ReservoirState& prev, const Eigen::VectorXd& x, double leak,
                                Activation f, const Eigen::MatrixXd& w_r,
                                const Eigen::MatrixXd& w_x) {
  check_leak(leak);
  check_finite(x, "input", prev.t);
  if (w_r.cols() != prev.r.size() || w_x.cols() != x.size() || w_x.rows() != w_r.rows()) {
    throw ConfigError("update_classical: dimension mismatch");
  }
  ReservoirState next;
  next.r = (1.0 - leak) * prev.r + leak * activate(f, Eigen::VectorXd(w_r * prev.r + w_x * x));
  next.t = prev.t + 1;
  return next;
}

Eigen::VectorXd assemble_learning_vector(const ReservoirState& state, const Eigen::VectorXd& x,
                                         const ActivationSet& acts) {
  Eigen::VectorXd out(1 + state.r.size() + x.size());
  out[0] = 1.0;
  out.segment(1, state.r.size()) = activate(acts.f_readout, state.r);
  out.tail(x.size()) = activate(acts.h_x, x);
  return out;
}

}  // namespace hqrc
