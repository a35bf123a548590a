#include "hqrc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "hqrc/error.hpp"

namespace hqrc {

namespace {

OdeSystem make_system(const SystemConfig& sys) {
  OdeSystem ode = sys.kind == SystemKind::Lorenz63 ? OdeSystem::lorenz63(sys.dt)
                                                   : OdeSystem::double_scroll_circuit(sys.dt);
  ode.double_scroll.self_term_sign = sys.self_term_sign;
  if (sys.substeps > 0) ode.substeps = sys.substeps;
  return ode;
}

std::vector<std::pair<std::string, std::string>> key_params(const ExperimentConfig& c) {
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  std::vector<std::pair<std::string, std::string>> p{
      {"system", std::string(to_string(c.system.kind))},
      {"train_steps", std::to_string(c.system.train_steps)},
      {"prune_steps", std::to_string(c.system.prune_steps)},
      {"test_steps", std::to_string(c.system.test_steps)},
      {"leak", num(c.activations.leak)},
      {"beta", num(c.beta)},
      {"shots", c.shots ? std::to_string(*c.shots) : "exact"},
      {"sigma", num(c.sigma)},
  };
  if (c.mode == Mode::Hqrc) {
    p.emplace_back("layout", c.circuit.layout.empty() ? c.circuit.preset : c.circuit.layout);
    p.emplace_back("n_qubits", std::to_string(c.circuit.n_qubits));
    p.emplace_back("n_layers", std::to_string(c.circuit.n_layers));
    p.emplace_back("feature_map", std::string(to_string(c.circuit.feature_map)));
    p.emplace_back("max_order", std::to_string(c.measurement.max_order));
    p.emplace_back("f_M", std::string(to_string(c.activations.f_m)));
  } else {
    p.emplace_back("esn_n_res", std::to_string(c.esn.n_res));
  }
  return p;
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& ctx) {
  if (const auto* nf = dynamic_cast<const NumericFault*>(&e)) throw NumericFault(ctx + nf->what());
  if (dynamic_cast<const UsageError*>(&e)) throw UsageError(ctx + e.what());
  if (dynamic_cast<const IoError*>(&e)) throw IoError(ctx + e.what());
  throw ConfigError(ctx + e.what());
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

Trajectory generate_truth(const SystemConfig& sys) {
  const OdeSystem ode = make_system(sys);
  const Vec3 ic = sys.initial_condition.value_or(ode.default_initial_condition());
  const std::size_t total = sys.transient_steps + sys.train_steps + sys.test_steps;
  Trajectory traj = integrate_rk4(ode, ic, total - 1);
  if (sys.transient_steps > 0) {
    traj = traj.slice(static_cast<Eigen::Index>(sys.transient_steps),
                      static_cast<Eigen::Index>(sys.train_steps + sys.test_steps));
    traj.t0 = 0.0;
  }
  return traj;
}

std::unique_ptr<ReservoirDriver> make_driver(const ExperimentConfig& cfg, std::uint64_t seed) {
  constexpr std::size_t n_input = 3;
  if (cfg.mode == Mode::ClassicalEsn) {
    Rng rng = make_rng(seed, Stream::Weights);
    Eigen::MatrixXd w_r = draw_matrix(cfg.esn.n_res, cfg.esn.n_res, cfg.weights.w_r, rng);
    Eigen::MatrixXd w_x = draw_matrix(cfg.esn.n_res, n_input, cfg.weights.w_x, rng);
    return std::make_unique<EchoStateReservoir>(cfg.esn.reservoir_scale * w_r,
                                                cfg.esn.input_scale * w_x, cfg.activations.leak,
                                                cfg.esn.activation, cfg.activations);
  }

  Rng block_rng = make_rng(seed, Stream::RandomBlocks);
  CircuitSpec circuit = parse_layout(cfg.circuit.resolved_layout(), cfg.circuit.n_qubits,
                                     cfg.circuit.feature_map, cfg.circuit.feedback_map, block_rng);
  ObservableSet observables(cfg.circuit.n_qubits, cfg.measurement);

  WeightDims dims;
  dims.encoding_dims = circuit.encoding_dims();
  dims.n_input = n_input;
  dims.n_meas = observables.size();
  dims.n_res = cfg.n_res == 0 ? observables.size() : cfg.n_res;
  WeightSet weights = generate_weights(dims, mix_seed(seed, static_cast<std::uint64_t>(Stream::Weights)),
                                       cfg.weights);

  ShotConfig shots;
  shots.shots = cfg.shots;
  shots.coherent_sigma = cfg.sigma;
  shots.rng_seed = seed;
  return std::make_unique<QuantumReservoir>(std::move(circuit), std::move(observables),
                                            std::move(weights), cfg.activations, shots);
}

RunSummary run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, bool keep_trajectories) {
  Trajectory raw;
  try {
    raw = generate_truth(cfg.system);
  } catch (const Error& e) {
    rethrow_with_context(e, "config " + hash_hex(config_hash(cfg)) + ": ");
  }
  return run_experiment(cfg, seed, raw, keep_trajectories);
}

RunSummary run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                          const Trajectory& raw_truth, bool keep_trajectories) {
  const auto start = std::chrono::steady_clock::now();
  RunSummary out;
  out.config_hash = hash_hex(config_hash(cfg));
  out.seed = seed;
  out.mode = std::string(to_string(cfg.mode));
  out.params = key_params(cfg);

  const auto& sys = cfg.system;
  const auto train = static_cast<Eigen::Index>(sys.train_steps);
  const auto test = static_cast<Eigen::Index>(sys.test_steps);
  if (raw_truth.length() < train + test) {
    throw UsageError("truth trajectory shorter than train_steps + test_steps");
  }
  if (test < 1) throw ConfigError("system.test_steps must be positive");

  try {
    const Normalizer norm = Normalizer::fit(raw_truth.slice(0, train));
    const Trajectory truth = norm.apply(raw_truth);
    out.normalizer_scale = norm.scale();

    auto driver = make_driver(cfg, seed);
    out.reservoir_size = driver->reservoir_size();
    TrainingConfig tcfg{sys.train_steps, sys.prune_steps, cfg.beta};
    TrainingResult trained = run_training(truth, *driver, tcfg);
    trained.model.config_hash = config_hash(cfg);
    trained.model.normalizer_scale = norm.scale();

    const Trajectory window = truth.slice(train, test);
    Trajectory pred = forecast(trained.model, *driver, truth.point(train - 1),
                               sys.test_steps, truth.dt);
    pred.t0 = window.t0;

    VptConfig vcfg;
    vcfg.epsilon = cfg.epsilon;
    vcfg.sigma = component_std(window);
    out.vpt = vpt(pred, window, vcfg);
    out.rmse = rmse_series(pred, window, vcfg.sigma);
    out.overlap = attractor_overlap(pred, window);

    const auto comp = static_cast<Eigen::Index>(cfg.return_map_component);
    const Eigen::VectorXd zp = pred.points.row(comp).transpose();
    const Eigen::VectorXd zt = window.points.row(comp).transpose();
    out.return_map_pred = poincare_return_map({zp.data(), static_cast<std::size_t>(zp.size())});
    out.return_map_truth = poincare_return_map({zt.data(), static_cast<std::size_t>(zt.size())});
    out.return_map_fraction = return_map_overlap(out.return_map_pred, out.return_map_truth);

    if (keep_trajectories) {
      out.truth = window;
      out.prediction = std::move(pred);
      out.model = ModelRecord{trained.model, trained.final_state, truth.point(train - 1)};
    }
  } catch (const Error& e) {
    rethrow_with_context(e, "config " + out.config_hash + " seed " + std::to_string(seed) + ": ");
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------

BoxStats box_stats(std::vector<double> v) {
  BoxStats s;
  s.n = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.median = quantile_sorted(v, 0.5);
  s.q1 = quantile_sorted(v, 0.25);
  s.q3 = quantile_sorted(v, 0.75);
  s.iqr = s.q3 - s.q1;
  s.whisker_lo = s.q1;
  s.whisker_hi = s.q3;
  for (double x : v) {
    if (x >= s.q1 - s.iqr) s.whisker_lo = std::min(s.whisker_lo, x);
    if (x <= s.q3 + s.iqr) s.whisker_hi = std::max(s.whisker_hi, x);
  }
  return s;
}

namespace {

// JSON string values appear bare in labels: "tanh" -> tanh.
std::string label_value(const std::string& json_text) {
  const bool quoted = json_text.size() >= 2 && json_text.front() == '"' && json_text.back() == '"' &&
                      json_text.find('\\') == std::string::npos;
  return quoted ? json_text.substr(1, json_text.size() - 2) : json_text;
}

}  // namespace

std::vector<SweepCell> expand_grid(const SweepGrid& grid) {
  std::vector<SweepCell> cells{{"", grid.base}};
  for (const auto& axis : grid.axes) {
    std::vector<SweepCell> next;
    for (const auto& cell : cells) {
      for (const auto& value : axis.values) {
        SweepCell c;
        c.label = cell.label.empty() ? "" : cell.label + ";";
        c.label += axis.path + "=" + label_value(value);
        c.config = with_override(cell.config, axis.path, value);
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

std::vector<RunSummary> run_many(const std::vector<std::pair<ExperimentConfig, std::uint64_t>>& jobs,
                                 unsigned workers, bool keep_trajectories) {
  std::vector<RunSummary> results(jobs.size());
  // Truth depends only on the system section; share it between jobs.
  std::map<std::string, Trajectory> truth_cache;
  std::vector<const Trajectory*> truth_of(jobs.size(), nullptr);
  std::vector<std::string> truth_error(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& sys = jobs[i].first.system;
    ExperimentConfig key_cfg;
    key_cfg.system = sys;
    const std::string key = to_canonical_json(key_cfg, false);
    auto it = truth_cache.find(key);
    if (it == truth_cache.end()) {
      try {
        it = truth_cache.emplace(key, generate_truth(sys)).first;
      } catch (const Error& e) {
        truth_error[i] = e.what();
        continue;
      }
    }
    truth_of[i] = &it->second;
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& [cfg, seed] = jobs[i];
      try {
        if (!truth_of[i]) throw NumericFault(truth_error[i]);
        results[i] = run_experiment(cfg, seed, *truth_of[i], keep_trajectories);
      } catch (const std::exception& e) {
        RunSummary failed;
        failed.config_hash = hash_hex(config_hash(cfg));
        failed.seed = seed;
        failed.mode = std::string(to_string(cfg.mode));
        failed.params = key_params(cfg);
        failed.error = e.what();
        results[i] = std::move(failed);
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1 || jobs.size() < 2) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, jobs.size()); ++w) pool.emplace_back(work);
  }
  return results;
}

SweepResult run_sweep(const SweepGrid& grid, unsigned workers) {
  const auto cells = expand_grid(grid);
  const auto& seeds = grid.seeds.empty() ? grid.base.seeds : grid.seeds;
  if (seeds.empty()) throw ConfigError("sweep has no seeds");

  std::vector<std::pair<ExperimentConfig, std::uint64_t>> jobs;
  for (const auto& cell : cells)
    for (auto seed : seeds) jobs.emplace_back(cell.config, seed);

  SweepResult out;
  out.runs = run_many(jobs, workers);
  for (std::size_t i = 0; i < out.runs.size(); ++i) out.runs[i].label = cells[i / seeds.size()].label;
  out.cells = aggregate(out.runs);
  return out;
}

std::vector<CellAggregate> aggregate(const std::vector<RunSummary>& runs) {
  std::vector<CellAggregate> cells;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> values;
  for (const auto& r : runs) {
    auto [it, fresh] = index.emplace(r.config_hash, cells.size());
    if (fresh) {
      cells.push_back({r.label, r.config_hash, {}, 0});
      values.emplace_back();
    }
    if (r.error) {
      ++cells[it->second].failures;
    } else {
      values[it->second].push_back(r.vpt.time);
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i].vpt = box_stats(values[i]);
  return cells;
}

}  // namespace hqrc
