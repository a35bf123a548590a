#pragma once

// Experiment configuration: typed view of the JSON config file plus its
// canonical form and hash. Schema is documented in configs/README.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hqrc/ansatz.hpp"
#include "hqrc/dynamics.hpp"
#include "hqrc/measurement.hpp"
#include "hqrc/reservoir.hpp"

namespace hqrc {

enum class Mode { Hqrc, ClassicalEsn };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view name);

struct SystemConfig {
  SystemKind kind = SystemKind::Lorenz63;
  std::optional<Vec3> initial_condition;  // nullopt: system default
  double dt = 0.01;
  std::size_t train_steps = 1500;
  std::size_t prune_steps = 100;
  std::size_t test_steps = 1200;
  std::size_t transient_steps = 0;  // integrated and discarded before t = 0
  double self_term_sign = 1.0;      // double-scroll V1/R1 sign
  unsigned substeps = 0;            // RK4 substeps per sample; 0: system default
};

struct CircuitConfig {
  std::string preset = "fig2e";
  std::string layout;  // explicit layer layout; overrides preset when set
  unsigned n_qubits = 8;
  unsigned n_layers = 1;
  FeatureMap feature_map = FeatureMap::Tanh;
  FeatureMap feedback_map = FeatureMap::Identity;
  std::string rotation_cycle = "XYZ";

  std::string resolved_layout() const;
};

struct EsnConfig {
  std::size_t n_res = 108;
  Activation activation = Activation::Tanh;
  double reservoir_scale = 1.0;  // multiplies the normalized W_r
  double input_scale = 1.0;      // multiplies the normalized W_X
};

struct ExperimentConfig {
  Mode mode = Mode::Hqrc;
  SystemConfig system;
  CircuitConfig circuit;
  MeasurementScheme measurement;
  ActivationSet activations;  // includes leak
  WeightDistributions weights;
  std::size_t n_res = 0;  // 0: equal to the measurement-vector length
  EsnConfig esn;
  double beta = 1e-8;
  std::optional<std::uint64_t> shots;  // nullopt: exact
  double sigma = 0.0;
  double epsilon = 0.3;
  unsigned return_map_component = 2;
  std::vector<std::uint64_t> seeds{0};
};

/// Missing keys take the defaults above. Throws ConfigError on unknown
/// names or malformed values.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Fully expanded JSON with sorted keys.
std::string to_canonical_json(const ExperimentConfig& cfg, bool include_seeds = true);

/// FNV-1a 64 over the canonical JSON without the seed list.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t h);

/// Replace the value at a JSON pointer (e.g. "/readout/beta") with a JSON
/// literal and re-parse.
ExperimentConfig with_override(const ExperimentConfig& cfg, std::string_view pointer,
                               std::string_view json_value);

struct SweepAxis {
  std::string path;                 // JSON pointer into the config
  std::vector<std::string> values;  // JSON literals
};

struct SweepGrid {
  ExperimentConfig base;
  std::vector<SweepAxis> axes;
  std::vector<std::uint64_t> seeds;  // empty: base.seeds
};

/// {"base": {...}, "axes": [{"path": "/circuit/feature_map", "values": [...]}],
///  "seeds": [...]}. The "axes" member may also be an object path -> values.
SweepGrid parse_sweep(std::string_view json_text);
SweepGrid load_sweep(const std::string& path);

}  // namespace hqrc
