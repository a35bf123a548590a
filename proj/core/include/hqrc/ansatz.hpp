#pragma once

// Per-time-step circuit construction from a declarative layer list.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hqrc/rng.hpp"
#include "hqrc/statevector.hpp"

namespace hqrc {

enum class FeatureMap { Tanh, PiTanh, PiSigmoid, Identity, PiIdentity };

inline constexpr std::array<FeatureMap, 5> kAllFeatureMaps{
    FeatureMap::Tanh, FeatureMap::PiTanh, FeatureMap::PiSigmoid, FeatureMap::Identity,
    FeatureMap::PiIdentity};

double apply_feature_map(FeatureMap phi, double x);
std::string_view to_string(FeatureMap phi);
/// Accepts "tanh", "pi_tanh", "pi_sigmoid", "identity", "pi_identity".
FeatureMap feature_map_from_string(std::string_view name);

struct QubitGraph {
  unsigned n_qubits = 0;
  std::vector<std::pair<unsigned, unsigned>> edges;

  /// Throws ConfigError on out-of-range endpoints or self-loops.
  void validate() const;
  /// True when no qubit appears in two edges.
  bool is_matching() const;
};

/// Ring edges (i, i+1 mod n) split into two CX sub-rounds.
struct RingPartition {
  QubitGraph ring1;
  QubitGraph ring2;
};

/// Even n: two perfect matchings. n == 2: the single edge in ring1. Odd n:
/// ring1 holds (0,1),(2,3),..., ring2 holds (1,2),(3,4),... and the closing
/// edge (n-1, 0) is appended to ring2, which then reuses qubit n-1.
RingPartition ring_graph(unsigned n_qubits);

struct DataEncodingLayer {
  std::vector<Pauli> axes;  // rotations applied to every qubit, in order
  FeatureMap phi = FeatureMap::Tanh;
  std::size_t weight_id = 0;

  /// d_L = n_qubits * axes.size(). Parameter a * n_qubits + q drives axis a on qubit q.
  std::size_t parameter_count(unsigned n_qubits) const { return n_qubits * axes.size(); }
};

struct CxLayer {
  QubitGraph graph;  // edge (a, b): control a, target b
};

enum class FeedbackSource { Measurement, Reservoir };

struct FeedbackLayer {
  FeedbackSource source = FeedbackSource::Measurement;
  std::vector<Pauli> axes{Pauli::X, Pauli::Y, Pauli::Z};
  FeatureMap phi = FeatureMap::Identity;
  /// selection[a * n_qubits + q] is the source index feeding R_{axes[a]} on q.
  /// Left empty until resolved against an observable set.
  std::vector<std::size_t> selection;
};

struct RandomLayer {
  std::vector<Pauli> axes{Pauli::Z, Pauli::X, Pauli::Z};
  std::vector<double> angles;  // frozen, axes.size() * n_qubits entries
  std::vector<QubitGraph> cx_rounds;
};

using LayerSpec = std::variant<DataEncodingLayer, CxLayer, FeedbackLayer, RandomLayer>;

struct CircuitSpec {
  unsigned n_qubits = 0;
  std::vector<LayerSpec> layers;

  /// d_L for every data-encoding layer, indexed by weight_id.
  std::vector<std::size_t> encoding_dims() const;
  bool has_feedback() const;
  /// Source of the first feedback layer; Measurement if there is none.
  FeedbackSource feedback_source() const;
  void validate() const;
};

/// Parses a layer layout such as "R:X R:Y CX1 R:Z R:X CX2 R:Y".
///
///   R:<axes>   data-encoding rotations, e.g. R:ZXZ for a U3-style layer
///   CX1, CX2   CX network on ring sub-round 1 or 2
///   FB / FBr   measurement feedback from M_{t-1} / r_{t-1}
///   RND        random block (ZXZ rotations + CX1 + CX2), angles ~ U[0, 2pi)
///
/// Presets: "L1".."L5" and "fig2e" (see expand_preset).
CircuitSpec parse_layout(std::string_view layout, unsigned n_qubits, FeatureMap encode_phi,
                         FeatureMap feedback_phi, Rng& random_block_rng);

/// Layer layout string for a named preset with n_layers repetitions.
/// `rotation_cycle` sets the axis sequence of single-rotation layers (L2..L5).
std::string expand_preset(std::string_view preset, unsigned n_layers,
                          std::string_view rotation_cycle = "XYZ");

bool is_preset_name(std::string_view name);

/// phi(W_in * x), elementwise.
Eigen::VectorXd encode_input(const Eigen::MatrixXd& w_in, const Eigen::VectorXd& x,
                             FeatureMap phi);

/// Angle table for a feedback layer: entry a * n_qubits + q is
/// phi(source[selection[a * n_qubits + q]]).
std::vector<double> feedback_angles(std::span<const double> source,
                                    std::span<const std::size_t> selection, FeatureMap phi);

/// Gate list for one time step. `feedback` may be empty (first step), in
/// which case feedback angles are phi(0).
std::vector<GateOp> build_circuit(const CircuitSpec& spec, const Eigen::VectorXd& x,
                                  std::span<const double> feedback,
                                  std::span<const Eigen::MatrixXd> w_in);

}  // namespace hqrc
