// hqrc: command-line front end for truth generation, single runs, sweeps,
// the classical baseline and re-aggregation of stored results.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hqrc/config.hpp"
#include "hqrc/error.hpp"
#include "hqrc/experiment.hpp"
#include "hqrc/report.hpp"

namespace fs = std::filesystem;
using namespace hqrc;

namespace {

struct CommonOpts {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_seeds;
  std::string shots;
  std::optional<double> sigma;
  std::string out = "results";
  unsigned workers = 1;
};

void add_common(CLI::App& cmd, CommonOpts& o, bool need_config = true) {
  auto* c = cmd.add_option("--config", o.config, "JSON config file");
  if (need_config) c->required()->check(CLI::ExistingFile);
  cmd.add_option("--seed", o.seed, "single seed (or first seed with --seeds)");
  cmd.add_option("--seeds", o.n_seeds, "number of consecutive seeds")->check(CLI::PositiveNumber);
  cmd.add_option("--shots", o.shots, "shot count or 'exact'");
  cmd.add_option("--sigma", o.sigma, "coherent angle-noise std")->check(CLI::NonNegativeNumber);
  cmd.add_option("--out", o.out, "output directory");
  cmd.add_option("--workers", o.workers, "parallel runs")->check(CLI::PositiveNumber);
}

std::optional<std::uint64_t> parse_shots(const std::string& s) {
  if (s == "exact") return std::nullopt;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || v == 0 || s.front() == '-') throw UsageError("--shots expects a positive integer or 'exact', got '" + s + "'");
  return v;
}

void apply_overrides(ExperimentConfig& cfg, const CommonOpts& o) {
  if (!o.shots.empty()) cfg.shots = parse_shots(o.shots);
  if (o.sigma) cfg.sigma = *o.sigma;
}

std::vector<std::uint64_t> resolve_seeds(const std::vector<std::uint64_t>& fallback, const CommonOpts& o) {
  if (o.n_seeds) {
    std::vector<std::uint64_t> seeds;
    const std::uint64_t first = o.seed.value_or(0);
    for (std::size_t i = 0; i < *o.n_seeds; ++i) seeds.push_back(first + i);
    return seeds;
  }
  if (o.seed) return {*o.seed};
  return fallback;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text << '\n';
}

void print_runs(const std::vector<RunSummary>& runs) {
  std::cout << std::fixed << std::setprecision(2);
  for (const auto& r : runs) {
    std::cout << r.config_hash << "  seed " << std::setw(4) << r.seed;
    if (!r.label.empty()) std::cout << "  " << r.label;
    if (r.error) {
      std::cout << "  FAILED: " << *r.error << '\n';
      continue;
    }
    std::cout << "  vpt " << std::setw(7) << r.vpt.time << (r.vpt.censored ? " (censored)" : "")
              << "  attractor " << std::setprecision(3) << r.overlap.fraction_inside
              << "  return-map " << r.return_map_fraction << std::setprecision(2) << '\n';
  }
}

void print_cells(const std::vector<CellAggregate>& cells) {
  std::cout << std::fixed << std::setprecision(3);
  for (const auto& c : cells) {
    std::cout << c.config_hash << "  n " << c.vpt.n << "  failed " << c.failures << "  mean " << c.vpt.mean
              << "  median " << c.vpt.median << "  q1 " << c.vpt.q1 << "  q3 " << c.vpt.q3 << "  max "
              << c.vpt.max;
    if (!c.label.empty()) std::cout << "  " << c.label;
    std::cout << '\n';
  }
}

void emit(const fs::path& dir, const std::vector<RunSummary>& runs, const std::vector<CellAggregate>& cells) {
  write_summaries_csv((dir / "summaries.csv").string(), runs);
  write_summaries_json((dir / "summaries.json").string(), runs);
  write_aggregate_csv((dir / "aggregate.csv").string(), cells);
}

std::vector<std::string> component_names(SystemKind kind) {
  const OdeSystem ode = kind == SystemKind::Lorenz63 ? OdeSystem::lorenz63() : OdeSystem::double_scroll_circuit();
  const auto names = ode.component_names();
  return {names.begin(), names.end()};
}

int cmd_generate(const CommonOpts& o) {
  const ExperimentConfig cfg = load_config(o.config);
  const Trajectory traj = generate_truth(cfg.system);
  const fs::path dir = prepare_out(o.out);
  const auto path = dir / (std::string(to_string(cfg.system.kind)) + ".csv");
  write_trajectory_csv(path.string(), traj, component_names(cfg.system.kind));
  std::cout << "wrote " << traj.length() << " points to " << path.string() << '\n';
  return 0;
}

int cmd_run(const CommonOpts& o, bool baseline) {
  ExperimentConfig cfg = load_config(o.config);
  if (baseline) cfg.mode = Mode::ClassicalEsn;
  apply_overrides(cfg, o);
  const auto seeds = resolve_seeds(cfg.seeds, o);

  std::vector<std::pair<ExperimentConfig, std::uint64_t>> jobs;
  for (auto s : seeds) jobs.emplace_back(cfg, s);
  const auto runs = run_many(jobs, o.workers, true);
  const auto cells = aggregate(runs);

  const fs::path dir = prepare_out(o.out);
  write_text(dir / "config.json", to_canonical_json(cfg));
  emit(dir, runs, cells);

  for (const auto& r : runs) {
    if (r.error) continue;
    const std::string tag = "seed" + std::to_string(r.seed);
    write_run_trajectory_csv((dir / ("trajectory_" + tag + ".csv")).string(), r, component_names(cfg.system.kind));
    if (r.model) save_model((dir / ("model_" + tag + ".json")).string(), *r.model);
  }

  print_runs(runs);
  if (runs.size() > 1) print_cells(cells);
  for (const auto& r : runs)
    if (r.error) return 3;
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  SweepGrid grid = load_sweep(o.config);
  apply_overrides(grid.base, o);
  grid.seeds = resolve_seeds(grid.seeds.empty() ? grid.base.seeds : grid.seeds, o);
  if (!o.shots.empty() || o.sigma) {
    std::erase_if(grid.axes, [&](const SweepAxis& a) {
      return (!o.shots.empty() && a.path == "/shots/shots") || (o.sigma && a.path == "/shots/sigma");
    });
  }
  const SweepResult res = run_sweep(grid, o.workers);
  const fs::path dir = prepare_out(o.out);
  write_text(dir / "base_config.json", to_canonical_json(grid.base));
  emit(dir, res.runs, res.cells);
  print_cells(res.cells);
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<RunSummary> runs;
  for (const auto& in : inputs) {
    auto part = read_summaries_json(in);
    runs.insert(runs.end(), part.begin(), part.end());
  }
  if (runs.empty()) throw UsageError("no runs found in the given summaries");
  const auto cells = aggregate(runs);
  const fs::path dir = prepare_out(out);
  write_aggregate_csv((dir / "aggregate.csv").string(), cells);
  write_summaries_csv((dir / "summaries.csv").string(), runs);
  print_cells(cells);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid quantum reservoir computing experiments"};
  app.require_subcommand(1);

  CommonOpts gen_o, run_o, base_o, sweep_o;
  auto* gen = app.add_subcommand("generate", "integrate the configured system and write its trajectory");
  add_common(*gen, gen_o);
  auto* run = app.add_subcommand("run", "train and forecast one config over one or more seeds");
  add_common(*run, run_o);
  auto* base = app.add_subcommand("baseline", "run the config as a classical echo state network");
  add_common(*base, base_o);
  auto* sweep = app.add_subcommand("sweep", "run a grid of configs over seeds");
  add_common(*sweep, sweep_o);

  std::vector<std::string> report_inputs;
  std::string report_out = "results";
  auto* report = app.add_subcommand("report", "re-aggregate stored summaries.json files");
  report->add_option("inputs", report_inputs, "summaries.json files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(gen_o);
    if (*run) return cmd_run(run_o, false);
    if (*base) return cmd_run(base_o, true);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*report) return cmd_report(report_inputs, report_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericFault& e) {
    std::cerr << "numeric fault: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
