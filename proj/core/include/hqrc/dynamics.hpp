#pragma once

// Ground-truth chaotic trajectories and data normalization.

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hqrc {

enum class Units { Raw, Normalized };

/// Fixed-step, D-dimensional time series. Column k of `points` is the state
/// at time t0 + k * dt.
struct Trajectory {
  double dt = 0.0;
  double t0 = 0.0;
  Eigen::MatrixXd points;  // D x T
  Units units = Units::Raw;

  Eigen::Index dim() const { return points.rows(); }
  Eigen::Index length() const { return points.cols(); }
  Eigen::VectorXd point(Eigen::Index k) const { return points.col(k); }
  /// Columns [begin, begin + count).
  Trajectory slice(Eigen::Index begin, Eigen::Index count) const;
};

using Vec3 = Eigen::Vector3d;

struct Lorenz63Params {
  double sigma = 10.0;
  double rho = 28.0;
  double b = 8.0 / 3.0;
};

struct DoubleScrollParams {
  double r1 = 1.2;
  double r2 = 3.44;
  double r4 = 0.193;
  double beta = 11.6;
  double ir = 2.25e-5;
  /// Sign of the V1/R1 term in dV1/dt. +1 reproduces the published form.
  double self_term_sign = 1.0;
};

Vec3 lorenz63_deriv(const Vec3& p, const Lorenz63Params& params = {});

/// State is (V1, V2, I). Throws NumericFault when |beta * (V1 - V2)| > 700.
Vec3 double_scroll_deriv(const Vec3& p, const DoubleScrollParams& params = {});

enum class SystemKind { Lorenz63, DoubleScroll };

std::string_view to_string(SystemKind k);
SystemKind system_kind_from_string(std::string_view name);

struct OdeSystem {
  SystemKind kind = SystemKind::Lorenz63;
  Lorenz63Params lorenz;
  DoubleScrollParams double_scroll;
  double dt = 0.01;
  /// RK4 steps of size dt / substeps per recorded sample.
  unsigned substeps = 1;

  static OdeSystem lorenz63(double dt = 0.01) { return {SystemKind::Lorenz63, {}, {}, dt, 1}; }
  static OdeSystem double_scroll_circuit(double dt = 0.25, unsigned substeps = 25) {
    return {SystemKind::DoubleScroll, {}, {}, dt, substeps};
  }

  Vec3 deriv(const Vec3& p) const;
  /// Initial conditions used throughout the experiments.
  Vec3 default_initial_condition() const;
  /// CSV component names (x, y, z or V1, V2, I).
  std::array<std::string, 3> component_names() const;
};

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// One classical RK4 step.
Eigen::VectorXd rk4_step(const VectorField& f, const Eigen::VectorXd& x, double dt);

/// steps + 1 points including x0. Throws NumericFault (with step index) on a
/// non-finite state.
Trajectory integrate_rk4(const VectorField& f, const Eigen::VectorXd& x0, double dt,
                         std::size_t steps, unsigned substeps = 1);
Trajectory integrate_rk4(const OdeSystem& system, const Vec3& x0, std::size_t steps);

/// Divides by the largest absolute component of the segment it was fitted on.
class Normalizer {
 public:
  Normalizer() = default;
  explicit Normalizer(double scale);

  /// Throws ConfigError for an empty or all-zero segment.
  static Normalizer fit(const Trajectory& segment);

  double scale() const { return scale_; }
  Trajectory apply(const Trajectory& raw) const;
  Trajectory invert(const Trajectory& normalized) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& raw) const { return raw / scale_; }
  Eigen::VectorXd invert(const Eigen::VectorXd& v) const { return v * scale_; }

 private:
  double scale_ = 1.0;
};

/// Header "t,<names...>", one row per point.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& names);
/// Reads a file written by write_trajectory_csv; dt is taken from the t column.
Trajectory read_trajectory_csv(const std::string& path, std::vector<std::string>* names = nullptr);

}  // namespace hqrc
