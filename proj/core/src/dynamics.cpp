#include "hqrc/dynamics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hqrc/error.hpp"
#include "numfmt.hpp"

namespace hqrc {

Trajectory Trajectory::slice(Eigen::Index begin, Eigen::Index count) const {
  if (begin < 0 || count < 0 || begin + count > length()) {
    throw UsageError("trajectory slice out of range");
  }
  Trajectory out;
  out.dt = dt;
  out.t0 = t0 + static_cast<double>(begin) * dt;
  out.points = points.middleCols(begin, count);
  out.units = units;
  return out;
}

Vec3 lorenz63_deriv(const Vec3& p, const Lorenz63Params& c) {
  return {c.sigma * (p.y() - p.x()), p.x() * (c.rho - p.z()) - p.y(), p.x() * p.y() - c.b * p.z()};
}

Vec3 double_scroll_deriv(const Vec3& p, const DoubleScrollParams& c) {
  const double dv = p[0] - p[1];
  const double arg = c.beta * dv;
  if (std::abs(arg) > 700.0 || !std::isfinite(arg)) {
    throw NumericFault("double-scroll sinh argument out of range: " + std::to_string(arg));
  }
  const double diode = 2.0 * c.ir * std::sinh(arg);
  return {c.self_term_sign * p[0] / c.r1 - dv / c.r2 - diode, dv / c.r2 + diode - p[2],
          p[1] - c.r4 * p[2]};
}

std::string_view to_string(SystemKind k) {
  return k == SystemKind::Lorenz63 ? "lorenz63" : "double-scroll";
}

SystemKind system_kind_from_string(std::string_view name) {
  if (name == "lorenz63") return SystemKind::Lorenz63;
  if (name == "double-scroll" || name == "double_scroll") return SystemKind::DoubleScroll;
  throw ConfigError("unknown system '" + std::string(name) + "'");
}

Vec3 OdeSystem::deriv(const Vec3& p) const {
  return kind == SystemKind::Lorenz63 ? lorenz63_deriv(p, lorenz)
                                      : double_scroll_deriv(p, double_scroll);
}

Vec3 OdeSystem::default_initial_condition() const {
  if (kind == SystemKind::Lorenz63) {
    return {17.67715816276679, 12.931379185960404, 43.91404334248268};
  }
  return {0.37926545, 0.058339, -0.08167691};
}

std::array<std::string, 3> OdeSystem::component_names() const {
  if (kind == SystemKind::Lorenz63) return {"x", "y", "z"};
  return {"V1", "V2", "I"};
}

// ---------------------------------------------------------------------------

Eigen::VectorXd rk4_step(const VectorField& f, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = f(x);
  const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = f(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_rk4(const VectorField& f, const Eigen::VectorXd& x0, double dt,
                         std::size_t steps, unsigned substeps) {
  if (!(dt > 0.0)) throw ConfigError("integration step dt must be positive");
  if (substeps == 0) throw ConfigError("substeps must be positive");
  const double h = dt / substeps;
  Trajectory traj;
  traj.dt = dt;
  traj.points.resize(x0.size(), static_cast<Eigen::Index>(steps + 1));
  traj.points.col(0) = x0;
  Eigen::VectorXd x = x0;
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      for (unsigned s = 0; s < substeps; ++s) x = rk4_step(f, x, h);
    } catch (const NumericFault& e) {
      throw NumericFault(e.what(), static_cast<long>(k));
    }
    if (!x.allFinite()) throw NumericFault("non-finite state during RK4 integration", static_cast<long>(k));
    traj.points.col(static_cast<Eigen::Index>(k)) = x;
  }
  return traj;
}

Trajectory integrate_rk4(const OdeSystem& system, const Vec3& x0, std::size_t steps) {
  VectorField f = [&system](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return system.deriv(Vec3(p[0], p[1], p[2]));
  };
  return integrate_rk4(f, Eigen::VectorXd(x0), system.dt, steps, system.substeps);
}

// ---------------------------------------------------------------------------

Normalizer::Normalizer(double scale) : scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("normalizer scale must be positive");
}

Normalizer Normalizer::fit(const Trajectory& segment) {
  if (segment.points.size() == 0) throw ConfigError("cannot fit normalizer on an empty segment");
  const double m = segment.points.cwiseAbs().maxCoeff();
  if (!(m > 0.0)) throw ConfigError("cannot fit normalizer on an all-zero segment");
  return Normalizer(m);
}

Trajectory Normalizer::apply(const Trajectory& raw) const {
  Trajectory out = raw;
  out.points = raw.points / scale_;
  out.units = Units::Normalized;
  return out;
}

Trajectory Normalizer::invert(const Trajectory& normalized) const {
  Trajectory out = normalized;
  out.points = normalized.points * scale_;
  out.units = Units::Raw;
  return out;
}

// ---------------------------------------------------------------------------

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& names) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << "t";
  for (Eigen::Index i = 0; i < traj.dim(); ++i) {
    os << "," << (static_cast<std::size_t>(i) < names.size() ? names[i] : "c" + std::to_string(i));
  }
  os << "\n";
  for (Eigen::Index k = 0; k < traj.length(); ++k) {
    os << detail::Stamp{traj.t0 + static_cast<double>(k) * traj.dt};
    for (Eigen::Index i = 0; i < traj.dim(); ++i) os << "," << detail::Shortest{traj.points(i, k)};
    os << "\n";
  }
  if (!os) throw IoError("write failed for '" + path + "'");
}

Trajectory read_trajectory_csv(const std::string& path, std::vector<std::string>* names) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw IoError("'" + path + "' is empty");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "t") throw IoError("'" + path + "': expected header t,...");
  const std::size_t dim = header.size() - 1;
  if (names) names->assign(header.begin() + 1, header.end());

  std::vector<double> ts;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != dim + 1) throw IoError("'" + path + "': ragged row");
    ts.push_back(row[0]);
    values.insert(values.end(), row.begin() + 1, row.end());
  }
  if (ts.empty()) throw IoError("'" + path + "' has no data rows");

  Trajectory traj;
  traj.t0 = ts.front();
  traj.dt = ts.size() > 1 ? (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1) : 0.0;
  traj.points = Eigen::Map<Eigen::MatrixXd>(values.data(), static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(ts.size()));
  return traj;
}

}  // namespace hqrc
