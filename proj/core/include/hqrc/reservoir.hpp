#pragma once

// Classical recurrent state: weight generation, the hybrid update, the plain
// leaky ESN update and learning-vector assembly.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hqrc {

enum class Activation { Identity, Tanh, Zero };

double activate(Activation f, double x);
Eigen::VectorXd activate(Activation f, const Eigen::VectorXd& x);
std::string_view to_string(Activation f);
Activation activation_from_string(std::string_view name);

struct ActivationSet {
  Activation f_r = Activation::Identity;
  Activation f_m = Activation::Identity;
  Activation f_x = Activation::Identity;
  Activation g = Activation::Identity;
  Activation f_readout = Activation::Tanh;  // f_R
  Activation h_x = Activation::Tanh;
  double leak = 0.7;
};

/// Largest singular value by power iteration on W^T W (deterministic start,
/// residual tolerance 1e-10, at most 10000 iterations).
double largest_singular_value(const Eigen::MatrixXd& w);

/// W / sigma_max(W). Throws ConfigError for a zero matrix.
Eigen::MatrixXd spectral_normalize(const Eigen::MatrixXd& w);

enum class WeightDistribution { StandardNormal, Uniform, Identity };

std::string_view to_string(WeightDistribution d);
WeightDistribution weight_distribution_from_string(std::string_view name);

struct WeightDims {
  std::vector<std::size_t> encoding_dims;  // rows of each W_in
  std::size_t n_input = 3;
  std::size_t n_res = 0;
  std::size_t n_meas = 0;
};

struct WeightDistributions {
  WeightDistribution w_in = WeightDistribution::StandardNormal;
  WeightDistribution w_r = WeightDistribution::StandardNormal;
  WeightDistribution w_m = WeightDistribution::Identity;
  WeightDistribution w_x = WeightDistribution::StandardNormal;
};

struct WeightSet {
  std::vector<Eigen::MatrixXd> w_in;
  Eigen::MatrixXd w_r;
  Eigen::MatrixXd w_m;
  Eigen::MatrixXd w_x;
  std::uint64_t seed = 0;
  WeightDistributions dists;
};

/// One matrix drawn from `dist` and spectrally normalized (identity is
/// returned as is; it needs rows == cols).
Eigen::MatrixXd draw_matrix(std::size_t rows, std::size_t cols, WeightDistribution dist,
                            std::mt19937_64& rng);

/// Deterministic in seed. Draw order: W_in (by layer), W_r, W_M, W_X.
WeightSet generate_weights(const WeightDims& dims, std::uint64_t seed,
                           const WeightDistributions& dists = {});

struct ReservoirState {
  Eigen::VectorXd r;
  std::size_t t = 0;
};

/// r_t = (1-a) r_{t-1} + a g[f_r(W_r r_{t-1}) + f_M(W_M M_t) + f_X(W_X X_t)]
ReservoirState update_hqrc(const ReservoirState& prev, const Eigen::VectorXd& m,
                           const Eigen::VectorXd& x, const ActivationSet& acts,
                           const WeightSet& weights);

/// r_t = (1-a) r_{t-1} + a f(W_r r_{t-1} + W_X X_t)
ReservoirState update_classical(const ReservoirState& prev, const Eigen::VectorXd& x, double leak,
                                Activation f, const Eigen::MatrixXd& w_r,
                                const Eigen::MatrixXd& w_x);

/// (1, f_R(r), h_X(x)).
Eigen::VectorXd assemble_learning_vector(const ReservoirState& state, const Eigen::VectorXd& x,
                                         const ActivationSet& acts);

}  // namespace hqrc
