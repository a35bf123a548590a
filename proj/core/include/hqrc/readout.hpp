#pragma once

// Ridge readout, teacher-forced training and closed-loop forecasting.

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "hqrc/ansatz.hpp"
#include "hqrc/dynamics.hpp"
#include "hqrc/measurement.hpp"
#include "hqrc/reservoir.hpp"

namespace hqrc {

struct ReadoutModel {
  Eigen::MatrixXd w_out;  // d_output x (1 + n_res + d_input)
  double beta = 0.0;
  std::size_t train_steps = 0;
  std::size_t prune_steps = 0;
  double normalizer_scale = 1.0;
  std::uint64_t config_hash = 0;

  Eigen::VectorXd predict(const Eigen::VectorXd& learning_vector) const;
};

/// W_o = Y R^T (R R^T + beta I)^{-1}, solved through a Cholesky factorization
/// of the symmetric system. R is features x samples, Y is outputs x samples.
/// Throws NumericFault if the system is not positive definite.
ReadoutModel fit_ridge(const Eigen::MatrixXd& r, const Eigen::MatrixXd& y, double beta);

/// ||Y - W R||_F^2 + beta ||W||_F^2
double ridge_objective(const Eigen::MatrixXd& w, const Eigen::MatrixXd& r,
                       const Eigen::MatrixXd& y, double beta);

/// Anything that turns an input sequence into learning vectors R_t.
class ReservoirDriver {
 public:
  virtual ~ReservoirDriver() = default;

  /// r <- 0, t <- 0, feedback cleared, internal generators re-seeded.
  virtual void reset() = 0;
  /// Consume X_t, advance the recurrence and return R_t.
  virtual Eigen::VectorXd advance(const Eigen::VectorXd& x) = 0;
  /// R for the current state paired with input x, without advancing.
  virtual Eigen::VectorXd learning_vector(const Eigen::VectorXd& x) const = 0;
  virtual const ReservoirState& state() const = 0;
  virtual void set_state(const ReservoirState& s) = 0;
  virtual std::size_t reservoir_size() const = 0;
};

/// Hybrid reservoir: circuit -> measurement vector -> hybrid update.
class QuantumReservoir final : public ReservoirDriver {
 public:
  QuantumReservoir(CircuitSpec circuit, ObservableSet observables, WeightSet weights,
                   ActivationSet acts, ShotConfig shots);

  void reset() override;
  Eigen::VectorXd advance(const Eigen::VectorXd& x) override;
  Eigen::VectorXd learning_vector(const Eigen::VectorXd& x) const override;
  const ReservoirState& state() const override { return state_; }
  void set_state(const ReservoirState& s) override { state_ = s; }
  std::size_t reservoir_size() const override { return static_cast<std::size_t>(weights_.w_r.rows()); }

  const CircuitSpec& circuit() const { return circuit_; }
  const ObservableSet& observables() const { return observables_; }
  const WeightSet& weights() const { return weights_; }
  /// M_t from the most recent step (empty before the first step).
  const Eigen::VectorXd& last_measurement() const { return last_m_; }

 private:
  CircuitSpec circuit_;
  ObservableSet observables_;
  WeightSet weights_;
  ActivationSet acts_;
  ShotConfig shots_;
  StateVector psi_;
  ReservoirState state_;
  Eigen::VectorXd last_m_;
  Rng shot_rng_;
  Rng noise_rng_;
};

/// Leaky ESN with a single activation f.
class EchoStateReservoir final : public ReservoirDriver {
 public:
  EchoStateReservoir(Eigen::MatrixXd w_r, Eigen::MatrixXd w_x, double leak, Activation f,
                     ActivationSet readout_acts);

  void reset() override;
  Eigen::VectorXd advance(const Eigen::VectorXd& x) override;
  Eigen::VectorXd learning_vector(const Eigen::VectorXd& x) const override;
  const ReservoirState& state() const override { return state_; }
  void set_state(const ReservoirState& s) override { state_ = s; }
  std::size_t reservoir_size() const override { return static_cast<std::size_t>(w_r_.rows()); }

 private:
  Eigen::MatrixXd w_r_;
  Eigen::MatrixXd w_x_;
  double leak_;
  Activation f_;
  ActivationSet acts_;
  ReservoirState state_;
};

/// Trained readout plus the reservoir state and input it was left at, enough
/// to resume forecasting.
struct ModelRecord {
  ReadoutModel model;
  ReservoirState state;
  Eigen::VectorXd last_input;
};

struct TrainingConfig {
  std::size_t train_steps = 1500;
  std::size_t prune_steps = 100;
  double beta = 1e-8;
};

struct TrainingResult {
  ReadoutModel model;
  ReservoirState final_state;
  Eigen::MatrixXd columns;  // regression R columns (after pruning)
  Eigen::MatrixXd targets;  // matching one-step-ahead targets
};

/// Teacher forcing over X_0..X_{train-1} with targets X_{t+1}; columns with
/// t < prune_steps are dropped. `truth` needs at least train_steps + 1 points.
TrainingResult run_training(const Trajectory& truth, ReservoirDriver& driver,
                            const TrainingConfig& cfg);

/// Closed loop from the driver's current state. The first prediction uses
/// the state paired with `last_input`; each prediction is fed back as the
/// next input. Throws NumericFault with the step index on divergence.
Trajectory forecast(const ReadoutModel& model, ReservoirDriver& driver,
                    const Eigen::VectorXd& last_input, std::size_t steps, double dt = 0.0);

}  // namespace hqrc
