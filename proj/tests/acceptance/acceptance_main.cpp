// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.
//
//   hqrc_acceptance [--unit-tests <hqrc_unit_tests>] [--workers N] [--out DIR]
//                   [--only 1,2,...]

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hqrc/config.hpp"
#include "hqrc/experiment.hpp"
#include "hqrc/measurement.hpp"
#include "hqrc/readout.hpp"
#include "hqrc/report.hpp"
#include "hqrc/reservoir.hpp"
#include "hqrc/statevector.hpp"
#include "oracles.hpp"

using namespace hqrc;

namespace {

struct Options {
  std::string unit_tests;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
  std::set<int> only;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_vpt(const std::vector<RunSummary>& runs) {
  double s = 0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (r.error) continue;
    s += r.vpt.time;
    ++n;
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

std::size_t failures(const std::vector<RunSummary>& runs) {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) { return r.error.has_value(); }));
}

const RunSummary* best_run(const std::vector<RunSummary>& runs) {
  const RunSummary* best = nullptr;
  for (const auto& r : runs)
    if (!r.error && (!best || r.vpt.time > best->vpt.time)) best = &r;
  return best;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double sx = std::accumulate(x.begin(), x.end(), 0.0), sy = std::accumulate(y.begin(), y.end(), 0.0);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void save(const Options& o, const std::string& name, const SweepResult& res) {
  if (o.out.empty()) return;
  std::filesystem::create_directories(o.out);
  write_summaries_csv((std::filesystem::path(o.out) / (name + "_summaries.csv")).string(), res.runs);
  write_aggregate_csv((std::filesystem::path(o.out) / (name + "_aggregate.csv")).string(), res.cells);
}

// ---------------------------------------------------------------------------
// 1. statevector and measurement vector against dense Kronecker algebra

Outcome simulator_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(1001);
  std::uniform_int_distribution<unsigned> n_dist(1, 4);
  std::uniform_int_distribution<std::size_t> g_dist(1, 40);
  const char axis_char[] = {'X', 'Y', 'Z'};
  double amp_err = 0, meas_err = 0;
  for (int c = 0; c < 500; ++c) {
    const unsigned n = n_dist(gen);
    const auto gates = oracle::random_circuit(n, g_dist(gen), gen);
    StateVector s(n);
    s.apply(gates);
    const auto psi = oracle::to_eigen(s);
    amp_err = std::max(amp_err, (psi - oracle::dense_run(gates, n)).cwiseAbs().maxCoeff());

    MeasurementScheme scheme;
    scheme.max_order = std::min(n, 3u);
    ObservableSet obs(n, scheme);
    Rng rng(0);
    const auto m = obs.measure(s, {}, rng);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const auto& p = obs.observables()[i];
      const std::vector<unsigned> qs(p.qubits().begin(), p.qubits().end());
      const double want = oracle::brute_expectation(psi, axis_char[static_cast<int>(p.axis())], qs, n);
      meas_err = std::max(meas_err, std::abs(m[static_cast<Eigen::Index>(i)] - want));
    }
  }
  const double secs = seconds_since(t0);
  return {amp_err <= 1e-10 && meas_err <= 1e-10 && secs < 60,
          "500 circuits, max amplitude err " + sci(amp_err) + ", max expectation err " + sci(meas_err) + ", " +
              fmt(secs, 2) + " s"};
}

// ---------------------------------------------------------------------------
// 2. hybrid update with f_M = 0 against the dense echo-state oracle

Outcome classical_limit() {
  std::mt19937_64 gen(1002);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-1, 1), leak(0, 1);
  double worst = 0;
  for (int probe = 0; probe < 1000; ++probe) {
    const Eigen::Index n = 2 + probe % 30;
    auto rnd = [&](Eigen::Index r, Eigen::Index c) {
      Eigen::MatrixXd m(r, c);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(gen);
      return m;
    };
    WeightSet w;
    w.w_r = spectral_normalize(rnd(n, n));
    w.w_m = spectral_normalize(rnd(n, n + 3));
    w.w_x = spectral_normalize(rnd(n, 3));
    Eigen::VectorXd r(n), x(3), m(n + 3);
    for (auto& v : r) v = ud(gen);
    for (auto& v : x) v = ud(gen);
    for (auto& v : m) v = 5 * ud(gen);
    ActivationSet acts;
    acts.f_m = Activation::Zero;
    acts.f_r = acts.f_x = Activation::Identity;
    const bool use_tanh = probe % 2 == 0;
    acts.g = use_tanh ? Activation::Tanh : Activation::Identity;
    acts.leak = leak(gen);
    const auto got = update_hqrc({r, 0}, m, x, acts, w);
    const auto want = oracle::esn_update(r, x, acts.leak, use_tanh, w.w_r, w.w_x);
    worst = std::max(worst, (got.r - want).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "1000 probes, max deviation " + sci(worst)};
}

// ---------------------------------------------------------------------------
// 3. closed-form ridge regression

Outcome ridge_regression() {
  std::mt19937_64 gen(1003);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> dim(2, 24), samples(5, 80), out(1, 4);
  std::uniform_real_distribution<double> log_beta(-4, 0);
  double worst_resid = 0, worst_cg = 0;
  int monotone_violations = 0;
  for (int sys = 0; sys < 100; ++sys) {
    const int p = dim(gen), n = samples(gen), d = out(gen);
    Eigen::MatrixXd r(p, n), y(d, n);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = nd(gen);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = nd(gen);
    const double beta = std::pow(10.0, log_beta(gen));
    const auto w = fit_ridge(r, y, beta).w_out;
    const Eigen::MatrixXd gram = r * r.transpose() + beta * Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd rhs = y * r.transpose();
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    worst_resid = std::max(worst_resid, (w * gram - rhs).cwiseAbs().maxCoeff() / scale);
    worst_cg = std::max(worst_cg, (w - oracle::ridge_cg(r, y, beta)).cwiseAbs().maxCoeff());

    double prev = INFINITY;
    for (double b : {1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2}) {
      const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(fit_ridge(r, y, b).w_out).singularValues()[0];
      if (norm > prev * (1 + 1e-12)) ++monotone_violations;
      prev = norm;
    }
  }
  return {worst_resid <= 1e-8 && worst_cg <= 1e-6 && monotone_violations == 0,
          "100 systems, max relative normal-equation residual " + sci(worst_resid) + ", max diff to CG " +
              sci(worst_cg) + ", norm-order violations " + std::to_string(monotone_violations)};
}

// ---------------------------------------------------------------------------
// 4-6. Lorenz63

ExperimentConfig lorenz_base() {
  return parse_config(R"({
    "mode": "hqrc",
    "system": {"kind": "lorenz63", "dt": 0.01, "train_steps": 1500, "prune_steps": 100, "test_steps": 1200},
    "circuit": {"preset": "fig2e", "n_qubits": 8},
    "measurement": {"axes": "XYZ", "max_order": 2, "connectivity": "all-to-all"},
    "shots": {"shots": "exact", "sigma": 0.0},
    "metrics": {"epsilon": 0.3, "return_map_component": 2}
  })");
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

struct LorenzSearch {
  SweepResult result;
  ExperimentConfig best_config;
  RunSummary best;
  ExperimentConfig family_config;  // cell with the highest median
  CellAggregate family;
  bool ok = false;
};

LorenzSearch lorenz_search(const Options& o) {
  LorenzSearch s;
  SweepGrid grid;
  grid.base = lorenz_base();
  grid.axes = {{"/circuit/feature_map", {"\"tanh\"", "\"pi_tanh\"", "\"pi_sigmoid\"", "\"identity\"", "\"pi_identity\""}},
               {"/reservoir/leak", {"0.6", "0.7"}},
               {"/readout/beta", {"1e-6", "1e-7", "1e-8"}}};
  grid.seeds = seed_range(20);
  const auto cells = expand_grid(grid);
  s.result = run_sweep(grid, o.workers);
  save(o, "lorenz_search", s.result);

  const RunSummary* b = best_run(s.result.runs);
  if (!b) return s;
  s.best = *b;
  const auto idx = static_cast<std::size_t>(b - s.result.runs.data()) / grid.seeds.size();
  s.best_config = cells[idx].config;

  std::size_t fam = 0;
  for (std::size_t i = 1; i < s.result.cells.size(); ++i)
    if (s.result.cells[i].vpt.median > s.result.cells[fam].vpt.median) fam = i;
  s.family = s.result.cells[fam];
  s.family_config = cells[fam].config;
  s.ok = true;
  return s;
}

Outcome lorenz_headline(const LorenzSearch& s) {
  if (!s.ok) return {false, "search produced no successful run"};
  auto long_cfg = s.best_config;
  long_cfg.system.test_steps = 1500;
  const auto lt = run_experiment(long_cfg, s.best.seed);
  const bool vpt_ok = s.best.vpt.time >= 8.0;
  const bool median_ok = s.family.vpt.median >= 3.0 && s.family.vpt.median <= 9.0;
  const bool attractor_ok = lt.overlap.fraction_inside >= 0.95;
  const bool map_ok = !lt.return_map_pred.empty() && lt.return_map_fraction >= 1.0;
  return {vpt_ok && median_ok && attractor_ok && map_ok,
          std::to_string(s.result.runs.size()) + " runs (" + std::to_string(failures(s.result.runs)) +
              " failed); best VPT " + fmt(s.best.vpt.time, 2) + " [" + s.best.label + " seed " +
              std::to_string(s.best.seed) + "]; best family median " + fmt(s.family.vpt.median, 2) + " [" +
              s.family.label + "]; 1500-step attractor fraction " + fmt(lt.overlap.fraction_inside) +
              ", return map " + std::to_string(lt.return_map_pred.size()) + " pairs, fraction inside " +
              fmt(lt.return_map_fraction)};
}

Outcome baseline_separation(const LorenzSearch& s, const Options& o) {
  if (!s.ok) return {false, "search produced no successful run"};
  SweepGrid ablation;
  ablation.base = s.family_config;
  ablation.base.activations.f_m = Activation::Zero;
  ablation.seeds = seed_range(10);
  const auto abl = run_sweep(ablation, o.workers);
  double abl_max = 0;
  for (const auto& r : abl.runs) abl_max = std::max(abl_max, r.error ? 0.0 : r.vpt.time);

  SweepGrid esn;
  esn.base = s.family_config;
  esn.base.mode = Mode::ClassicalEsn;
  esn.base.esn.n_res = 108;
  esn.seeds = seed_range(10);
  const auto esn_res = run_sweep(esn, o.workers);
  const RunSummary* esn_best = best_run(esn_res.runs);
  const double esn_best_vpt = esn_best ? esn_best->vpt.time : 0.0;
  const double esn_mean = mean_vpt(esn_res.runs);
  save(o, "ablation_fm_zero", abl);
  save(o, "esn_baseline", esn_res);

  const bool abl_ok = failures(abl.runs) == 0 && abl_max < 1.0;
  const bool esn_ok = failures(esn_res.runs) == 0 && esn_mean > 0.0 && esn_best_vpt < s.best.vpt.time;
  return {abl_ok && esn_ok, "f_M = 0: max VPT " + fmt(abl_max, 2) + " over 10 seeds; ESN(108): mean VPT " +
                                fmt(esn_mean, 2) + ", best " + fmt(esn_best_vpt, 2) + " vs HQRC best " +
                                fmt(s.best.vpt.time, 2)};
}

Outcome shot_degradation(const LorenzSearch& s, const Options& o) {
  if (!s.ok) return {false, "search produced no successful run"};
  const std::vector<std::optional<std::uint64_t>> levels{std::nullopt, 50000, 25000, 10000, 5000, 1000};
  constexpr std::size_t kShotSeeds = 50;
  const auto seeds = seed_range(kShotSeeds);
  std::vector<double> means;
  std::string detail = "mean VPT over " + std::to_string(kShotSeeds) + " seeds:";
  std::size_t failed = 0;
  for (const auto& shots : levels) {
    SweepGrid g;
    g.base = s.family_config;
    g.base.shots = shots;
    g.seeds = seeds;
    const auto res = run_sweep(g, o.workers);
    save(o, "shots_" + (shots ? std::to_string(*shots) : std::string("exact")), res);
    failed += failures(res.runs);
    means.push_back(mean_vpt(res.runs));
    detail += " " + (shots ? std::to_string(*shots) : std::string("exact")) + "=" + fmt(means.back(), 3);
  }
  bool nonincreasing = true;
  for (std::size_t i = 1; i < means.size(); ++i) nonincreasing = nonincreasing && means[i] <= means[i - 1];
  const bool drop_at_10k = means[3] < means[0];

  // Angle noise at fixed shot settings.
  bool noise_ok = true;
  for (const auto& shots : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{50000}}) {
    SweepGrid g;
    g.base = s.family_config;
    g.base.shots = shots;
    g.base.sigma = 0.05;
    g.seeds = seeds;
    const auto res = run_sweep(g, o.workers);
    save(o, std::string("sigma_0.05_") + (shots ? "50000" : "exact"), res);
    const double m = mean_vpt(res.runs);
    const double clean = shots ? means[1] : means[0];
    noise_ok = noise_ok && m < clean;
    detail += "; sigma 0.05 at " + std::string(shots ? "50000" : "exact") + " = " + fmt(m, 3);
  }
  if (failed) detail += "; failed runs " + std::to_string(failed);
  return {nonincreasing && drop_at_10k && noise_ok, detail};
}

// ---------------------------------------------------------------------------
// 7. double scroll

Outcome double_scroll(const Options& o) {
  SweepGrid grid;
  grid.base = parse_config(R"({
    "mode": "hqrc",
    "system": {"kind": "double-scroll", "dt": 0.25, "train_steps": 1500, "prune_steps": 100, "test_steps": 1200},
    "circuit": {"preset": "fig2e", "n_qubits": 8},
    "measurement": {"axes": "XYZ", "max_order": 3, "connectivity": "all-to-all"},
    "shots": {"shots": "exact", "sigma": 0.0},
    "metrics": {"epsilon": 0.3, "return_map_component": 0}
  })");
  grid.axes = {{"/circuit/feature_map", {"\"tanh\"", "\"pi_tanh\"", "\"pi_identity\""}},
               {"/reservoir/leak", {"0.7", "1.0"}},
               {"/readout/beta", {"1e-6", "1e-7"}}};
  grid.seeds = seed_range(5);
  const auto res = run_sweep(grid, o.workers);
  save(o, "double_scroll_search", res);
  const RunSummary* b = best_run(res.runs);
  if (!b) return {false, "no successful run"};
  return {b->vpt.time >= 50.0 && b->overlap.fraction_inside >= 0.95,
          std::to_string(res.runs.size()) + " runs (" + std::to_string(failures(res.runs)) +
              " failed), reservoir " + std::to_string(b->reservoir_size) + "; best VPT " + fmt(b->vpt.time, 2) +
              " [" + b->label + " seed " + std::to_string(b->seed) + "], attractor fraction " +
              fmt(b->overlap.fraction_inside)};
}

// ---------------------------------------------------------------------------
// 8. metric and convergence checks

Outcome metric_checks(const Options& o) {
  std::vector<std::string> notes;
  bool ok = true;

  if (!o.unit_tests.empty()) {
    const std::string cmd = "\"" + o.unit_tests + "\" --gtest_brief=1 > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    ok = ok && rc == 0;
    notes.push_back(std::string("unit suite ") + (rc == 0 ? "passed" : "FAILED"));
  } else {
    notes.push_back("unit suite not given");
    ok = false;
  }

  // RK4 order on x' = -x.
  {
    const VectorField f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };
    std::vector<double> lx, ly;
    for (double dt : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
      const auto traj = integrate_rk4(f, Eigen::VectorXd::Ones(1), dt, static_cast<std::size_t>(std::lround(1 / dt)));
      lx.push_back(std::log(dt));
      ly.push_back(std::log(std::abs(traj.points(0, traj.length() - 1) - std::exp(-1.0))));
    }
    const double k = slope(lx, ly);
    ok = ok && std::abs(k - 4.0) <= 0.3;
    notes.push_back("RK4 slope " + fmt(k, 3));
  }

  // Sampling error of a fixed correlator against shot count.
  {
    std::mt19937_64 gen(1008);
    StateVector s(3);
    s.apply(oracle::random_circuit(3, 25, gen));
    const PauliString p(Pauli::X, {0, 2});
    const double exact = expectation(s, p);
    std::vector<double> lx, ly;
    Rng rng(88);
    for (std::uint64_t shots : {100ull, 1000ull, 10000ull, 100000ull}) {
      double sq = 0;
      const int reps = 300;
      for (int i = 0; i < reps; ++i) {
        const double e = estimate_from_counts(sample_basis(s, Pauli::X, shots, rng), p) - exact;
        sq += e * e;
      }
      lx.push_back(std::log(static_cast<double>(shots)));
      ly.push_back(0.5 * std::log(sq / reps));
    }
    const double k = slope(lx, ly);
    ok = ok && std::abs(k + 0.5) <= 0.1;
    notes.push_back("sampling slope " + fmt(k, 3));
  }

  // VPT epsilon monotonicity and scale invariance.
  {
    std::mt19937_64 gen(1009);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> c_dist(0.01, 100.0);
    int mono_bad = 0, scale_bad = 0;
    for (int probe = 0; probe < 100; ++probe) {
      Trajectory truth, pred;
      truth.dt = pred.dt = 0.01;
      truth.points.resize(3, 200);
      pred.points.resize(3, 200);
      Eigen::Vector3d x(nd(gen), nd(gen), nd(gen)), drift = Eigen::Vector3d::Zero();
      for (Eigen::Index k = 0; k < 200; ++k) {
        x += 0.1 * Eigen::Vector3d(nd(gen), nd(gen), nd(gen));
        drift += 0.01 * Eigen::Vector3d(nd(gen), nd(gen), nd(gen));
        truth.points.col(k) = x;
        pred.points.col(k) = x + drift;
      }
      double prev = -1;
      for (double eps : {0.05, 0.1, 0.2, 0.3, 0.5, 1.0}) {
        VptConfig cfg;
        cfg.epsilon = eps;
        const double v = vpt(pred, truth, cfg).time;
        if (v < prev) ++mono_bad;
        prev = v;
      }
      const double c = c_dist(gen);
      Trajectory tc = truth, pc = pred;
      tc.points *= c;
      pc.points *= c;
      VptConfig a, b;
      a.sigma = component_std(truth);
      b.sigma = c * a.sigma;
      if (vpt(pred, truth, a).index != vpt(pc, tc, b).index) ++scale_bad;
    }
    ok = ok && mono_bad == 0 && scale_bad == 0;
    notes.push_back("VPT epsilon-order violations " + std::to_string(mono_bad) + ", scale violations " +
                    std::to_string(scale_bad) + " over 100 probes");
  }

  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

Options parse_args(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << a << '\n';
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--unit-tests") {
      o.unit_tests = next();
    } else if (a == "--workers") {
      o.workers = static_cast<unsigned>(std::max(1, std::stoi(next())));
    } else if (a == "--out") {
      o.out = next();
    } else if (a == "--only") {
      std::stringstream ss(next());
      for (std::string tok; std::getline(ss, tok, ',');) o.only.insert(std::stoi(tok));
    } else {
      std::cerr << "unknown argument " << a << '\n';
      std::exit(2);
    }
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const Options opts = parse_args(argc, argv);
  auto wanted = [&](int k) { return opts.only.empty() || opts.only.count(k) > 0; };

  int failed = 0;
  std::ofstream verdicts;
  if (!opts.out.empty()) {
    std::filesystem::create_directories(opts.out);
    verdicts.open(std::filesystem::path(opts.out) / "verdicts.txt");
  }
  auto report = [&](int k, const std::string& name, const std::function<Outcome()>& fn) {
    if (!wanted(k)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failed;
    const std::string line = "criterion " + std::to_string(k) + " " + (out.pass ? "PASS" : "FAIL") + "  " + name +
                             ": " + out.detail + "  (" + fmt(seconds_since(t0), 1) + " s)";
    std::cout << line << std::endl;
    if (verdicts) verdicts << line << std::endl;
  };

  report(1, "simulator oracle equivalence", simulator_equivalence);
  report(2, "classical-limit reduction", classical_limit);
  report(3, "ridge regression", ridge_regression);

  std::optional<LorenzSearch> search;
  auto get_search = [&]() -> const LorenzSearch& {
    if (!search) search = lorenz_search(opts);
    return *search;
  };
  report(4, "Lorenz63 headline search", [&] { return lorenz_headline(get_search()); });
  report(5, "classical baseline separation", [&] { return baseline_separation(get_search(), opts); });
  report(6, "shot-noise degradation", [&] { return shot_degradation(get_search(), opts); });
  report(7, "double-scroll", [&] { return double_scroll(opts); });
  report(8, "metric and convergence checks", [&] { return metric_checks(opts); });

  return failed == 0 ? 0 : 1;
}
