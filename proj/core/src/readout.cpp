#include "hqrc/readout.hpp"

#include <Eigen/Cholesky>

#include "hqrc/error.hpp"

namespace hqrc {

Eigen::VectorXd ReadoutModel::predict(const Eigen::VectorXd& learning_vector) const {
  if (learning_vector.size() != w_out.cols()) {
    throw UsageError("readout expects learning vectors of length " + std::to_string(w_out.cols()));
  }
  return w_out * learning_vector;
}

ReadoutModel fit_ridge(const Eigen::MatrixXd& r, const Eigen::MatrixXd& y, double beta) {
  if (r.cols() < 1) throw UsageError("fit_ridge: need at least one sample");
  if (r.cols() != y.cols()) throw UsageError("fit_ridge: R and Y sample counts differ");
  if (!(beta >= 0.0)) throw ConfigError("fit_ridge: beta must be nonnegative");

  Eigen::MatrixXd gram = r * r.transpose();
  gram.diagonal().array() += beta;
  const Eigen::MatrixXd rhs = r * y.transpose();  // (Y R^T)^T

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericFault("fit_ridge: R R^T + beta I is not positive definite (beta = " +
                       std::to_string(beta) + ")");
  }
  ReadoutModel model;
  model.w_out = llt.solve(rhs).transpose();
  model.beta = beta;
  if (!model.w_out.allFinite()) throw NumericFault("fit_ridge: non-finite readout weights");
  return model;
}

double ridge_objective(const Eigen::MatrixXd& w, const Eigen::MatrixXd& r,
                       const Eigen::MatrixXd& y, double beta) {
  return (y - w * r).squaredNorm() + beta * w.squaredNorm();
}

// ---------------------------------------------------------------------------

QuantumReservoir::QuantumReservoir(CircuitSpec circuit, ObservableSet observables,
                                   WeightSet weights, ActivationSet acts, ShotConfig shots)
    : circuit_(std::move(circuit)),
      observables_(std::move(observables)),
      weights_(std::move(weights)),
      acts_(acts),
      shots_(shots),
      psi_(circuit_.n_qubits) {
  if (observables_.n_qubits() != circuit_.n_qubits) {
    throw ConfigError("observable set and circuit disagree on qubit count");
  }
  resolve_feedback(circuit_, observables_);
  if (weights_.w_m.cols() != static_cast<Eigen::Index>(observables_.size())) {
    throw ConfigError("W_M has " + std::to_string(weights_.w_m.cols()) + " columns but " +
                      std::to_string(observables_.size()) + " observables are measured");
  }
  const auto dims = circuit_.encoding_dims();
  if (dims.size() != weights_.w_in.size()) {
    throw ConfigError("circuit has " + std::to_string(dims.size()) +
                      " data-encoding layers but " + std::to_string(weights_.w_in.size()) +
                      " W_in matrices were given");
  }
  if (circuit_.has_feedback() && circuit_.feedback_source() == FeedbackSource::Reservoir) {
    for (const auto& layer : circuit_.layers)
      if (const auto* fb = std::get_if<FeedbackLayer>(&layer))
        for (std::size_t s : fb->selection)
          if (s >= static_cast<std::size_t>(weights_.w_r.rows()))
            throw ConfigError("reservoir feedback selection exceeds reservoir size");
  }
  reset();
}

void QuantumReservoir::reset() {
  state_.r = Eigen::VectorXd::Zero(weights_.w_r.rows());
  state_.t = 0;
  last_m_.resize(0);
  shot_rng_ = make_rng(shots_.rng_seed, Stream::Shots);
  noise_rng_ = make_rng(shots_.rng_seed, Stream::CoherentNoise);
}

Eigen::VectorXd QuantumReservoir::advance(const Eigen::VectorXd& x) {
  std::span<const double> feedback;
  if (circuit_.has_feedback()) {
    const Eigen::VectorXd& src =
        circuit_.feedback_source() == FeedbackSource::Reservoir ? state_.r : last_m_;
    if (state_.t > 0) feedback = std::span<const double>(src.data(), static_cast<std::size_t>(src.size()));
  }
  std::vector<GateOp> gates = build_circuit(circuit_, x, feedback, weights_.w_in);
  if (shots_.coherent_sigma > 0) gates = perturb_angles(gates, shots_.coherent_sigma, noise_rng_);

  psi_.reset();
  psi_.apply(gates);
  last_m_ = observables_.measure(psi_, shots_, shot_rng_);
  state_ = update_hqrc(state_, last_m_, x, acts_, weights_);
  return assemble_learning_vector(state_, x, acts_);
}

Eigen::VectorXd QuantumReservoir::learning_vector(const Eigen::VectorXd& x) const {
  return assemble_learning_vector(state_, x, acts_);
}

EchoStateReservoir::EchoStateReservoir(Eigen::MatrixXd w_r, Eigen::MatrixXd w_x, double leak,
                                       Activation f, ActivationSet readout_acts)
    : w_r_(std::move(w_r)), w_x_(std::move(w_x)), leak_(leak), f_(f), acts_(readout_acts) {
  if (w_r_.rows() != w_r_.cols() || w_x_.rows() != w_r_.rows()) {
    throw ConfigError("echo state reservoir: inconsistent weight shapes");
  }
  reset();
}

void EchoStateReservoir::reset() {
  state_.r = Eigen::VectorXd::Zero(w_r_.rows());
  state_.t = 0;
}

Eigen::VectorXd EchoStateReservoir::advance(const Eigen::VectorXd& x) {
  state_ = update_classical(state_, x, leak_, f_, w_r_, w_x_);
  return assemble_learning_vector(state_, x, acts_);
}

Eigen::VectorXd EchoStateReservoir::learning_vector(const Eigen::VectorXd& x) const {
  return assemble_learning_vector(state_, x, acts_);
}

// ---------------------------------------------------------------------------

TrainingResult run_training(const Trajectory& truth, ReservoirDriver& driver,
                            const TrainingConfig& cfg) {
  if (cfg.train_steps == 0) throw ConfigError("train_steps must be positive");
  if (cfg.prune_steps >= cfg.train_steps) throw ConfigError("prune_steps must be < train_steps");
  if (static_cast<std::size_t>(truth.length()) < cfg.train_steps + 1) {
    throw UsageError("training needs " + std::to_string(cfg.train_steps + 1) +
                     " points, trajectory has " + std::to_string(truth.length()));
  }
  driver.reset();
  const auto n_cols = static_cast<Eigen::Index>(cfg.train_steps - cfg.prune_steps);
  TrainingResult out;
  out.targets.resize(truth.dim(), n_cols);
  for (std::size_t t = 0; t < cfg.train_steps; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    Eigen::VectorXd rt = driver.advance(truth.points.col(ti));
    if (t < cfg.prune_steps) continue;
    const auto c = static_cast<Eigen::Index>(t - cfg.prune_steps);
    if (out.columns.size() == 0) out.columns.resize(rt.size(), n_cols);
    out.columns.col(c) = rt;
    out.targets.col(c) = truth.points.col(ti + 1);
  }
  out.model = fit_ridge(out.columns, out.targets, cfg.beta);
  out.model.train_steps = cfg.train_steps;
  out.model.prune_steps = cfg.prune_steps;
  out.final_state = driver.state();
  return out;
}

Trajectory forecast(const ReadoutModel& model, ReservoirDriver& driver,
                    const Eigen::VectorXd& last_input, std::size_t steps, double dt) {
  Trajectory out;
  out.dt = dt;
  out.units = Units::Normalized;
  out.points.resize(model.w_out.rows(), static_cast<Eigen::Index>(steps));
  if (steps == 0) return out;

  Eigen::VectorXd y = model.predict(driver.learning_vector(last_input));
  for (std::size_t k = 0; k < steps; ++k) {
    if (!y.allFinite()) throw NumericFault("forecast diverged", static_cast<long>(k));
    out.points.col(static_cast<Eigen::Index>(k)) = y;
    if (k + 1 < steps) y = model.predict(driver.advance(y));
  }
  return out;
}

}  // namespace hqrc
