#pragma once

// Observable sets and evaluation of the measurement vector M_t.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hqrc/ansatz.hpp"
#include "hqrc/rng.hpp"
#include "hqrc/statevector.hpp"

namespace hqrc {

struct ShotConfig {
  /// nullopt means exact expectations from the wave function.
  std::optional<std::uint64_t> shots;
  /// Std-dev of the Gaussian perturbation added to every rotation angle.
  double coherent_sigma = 0.0;
  std::uint64_t rng_seed = 0;

  bool exact() const { return !shots.has_value(); }
};

struct MeasurementScheme {
  std::vector<Pauli> axes{Pauli::X, Pauli::Y, Pauli::Z};
  unsigned max_order = 2;
  /// nullopt = all-to-all. For order 3 on a graph, triangles of the graph
  /// are used as 3-body correlators.
  std::optional<QubitGraph> connectivity;
};

/// Canonical observable order: axis-major (in scheme.axes order), then
/// ascending order, then lexicographic qubit tuples.
std::vector<PauliString> build_observables(unsigned n_qubits, const MeasurementScheme& scheme);

/// 3N + 3 C(N,2) [+ 3 C(N,3)] for the all-to-all, three-axis scheme.
std::size_t all_to_all_size(unsigned n_qubits, unsigned max_order, std::size_t n_axes = 3);

class ObservableSet {
 public:
  ObservableSet(unsigned n_qubits, const MeasurementScheme& scheme);

  unsigned n_qubits() const { return n_qubits_; }
  std::size_t size() const { return observables_.size(); }
  std::span<const PauliString> observables() const { return observables_; }
  const MeasurementScheme& scheme() const { return scheme_; }

  /// Index of `obs`, or nullopt if it is not measured.
  std::optional<std::size_t> index_of(const PauliString& obs) const;

  /// Exact mode: amplitudes only. Finite shots: one count table per axis,
  /// shared by every correlator on that axis.
  Eigen::VectorXd measure(const StateVector& state, const ShotConfig& shots, Rng& rng) const;

  /// Exact values using expectation() term by term (slow reference path).
  Eigen::VectorXd measure_direct(const StateVector& state) const;

 private:
  unsigned n_qubits_;
  MeasurementScheme scheme_;
  std::vector<PauliString> observables_;
  // Observables grouped by axis: (axis, [(output index, mask)]).
  struct AxisGroup {
    Pauli axis;
    std::vector<std::pair<std::size_t, std::uint64_t>> entries;
  };
  std::vector<AxisGroup> groups_;
};

/// measure_vector from the module contract; thin wrapper over ObservableSet.
Eigen::VectorXd measure_vector(const StateVector& state, const ObservableSet& observables,
                               const ShotConfig& shots, Rng& rng);

/// Default feedback wiring: <P_q> feeds R_P on qubit q. Throws ConfigError
/// if a needed single-qubit expectation is not in the set.
std::vector<std::size_t> default_feedback_selection(const FeedbackLayer& layer, unsigned n_qubits,
                                                    const ObservableSet& observables);

/// Fill every unresolved feedback selection in `spec`.
void resolve_feedback(CircuitSpec& spec, const ObservableSet& observables);

}  // namespace hqrc
