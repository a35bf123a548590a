#include "hqrc/measurement.hpp"

#include <algorithm>
#include <set>

#include "hqrc/error.hpp"

namespace hqrc {

namespace {

std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::size_t all_to_all_size(unsigned n, unsigned max_order, std::size_t n_axes) {
  std::size_t per_axis = 0;
  for (unsigned k = 1; k <= max_order; ++k) per_axis += choose(n, k);
  return n_axes * per_axis;
}

std::vector<PauliString> build_observables(unsigned n, const MeasurementScheme& scheme) {
  if (scheme.max_order < 1 || scheme.max_order > 3) {
    throw ConfigError("measurement order must be 1, 2 or 3, got " +
                      std::to_string(scheme.max_order));
  }
  if (n < 1 || n > kMaxQubits) throw ConfigError("measurement qubit count out of range");
  if (scheme.axes.empty()) throw ConfigError("measurement scheme needs at least one axis");

  std::set<std::pair<unsigned, unsigned>> pairs;
  std::set<std::array<unsigned, 3>> triples;
  if (!scheme.connectivity) {
    for (unsigned i = 0; i < n; ++i)
      for (unsigned j = i + 1; j < n; ++j) {
        pairs.insert({i, j});
        for (unsigned k = j + 1; k < n; ++k) triples.insert({i, j, k});
      }
  } else {
    const auto& g = *scheme.connectivity;
    if (g.n_qubits != n) throw ConfigError("connectivity graph size does not match qubit count");
    g.validate();
    for (auto [a, b] : g.edges) pairs.insert({std::min(a, b), std::max(a, b)});
    for (auto [i, j] : pairs)
      for (unsigned k = j + 1; k < n; ++k)
        if (pairs.count({i, k}) && pairs.count({j, k})) triples.insert({i, j, k});
  }

  std::vector<PauliString> out;
  for (Pauli axis : scheme.axes) {
    for (unsigned q = 0; q < n; ++q) out.emplace_back(axis, std::vector<unsigned>{q});
    if (scheme.max_order >= 2)
      for (auto [i, j] : pairs) out.emplace_back(axis, std::vector<unsigned>{i, j});
    if (scheme.max_order >= 3)
      for (const auto& t : triples) out.emplace_back(axis, std::vector<unsigned>{t[0], t[1], t[2]});
  }
  return out;
}

ObservableSet::ObservableSet(unsigned n_qubits, const MeasurementScheme& scheme)
    : n_qubits_(n_qubits), scheme_(scheme), observables_(build_observables(n_qubits, scheme)) {
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    const auto& obs = observables_[i];
    auto it = std::find_if(groups_.begin(), groups_.end(),
                           [&](const AxisGroup& g) { return g.axis == obs.axis(); });
    if (it == groups_.end()) {
      groups_.push_back({obs.axis(), {}});
      it = std::prev(groups_.end());
    }
    it->entries.emplace_back(i, obs.mask());
  }
}

std::optional<std::size_t> ObservableSet::index_of(const PauliString& obs) const {
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    if (observables_[i] == obs) return i;
  }
  return std::nullopt;
}

Eigen::VectorXd ObservableSet::measure(const StateVector& state, const ShotConfig& shots,
                                       Rng& rng) const {
  if (state.n_qubits() != n_qubits_) {
    throw ConfigError("observable set built for " + std::to_string(n_qubits_) +
                      " qubits, state has " + std::to_string(state.n_qubits()));
  }
  Eigen::VectorXd values(observables_.size());
  for (const auto& group : groups_) {
    std::vector<double> dist = basis_probabilities(state, group.axis);
    if (!shots.exact()) {
      if (*shots.shots == 0) throw ConfigError("shot count must be positive");
      const auto counts = sample_distribution(dist, *shots.shots, rng);
      const double inv = 1.0 / static_cast<double>(*shots.shots);
      for (std::size_t b = 0; b < dist.size(); ++b) dist[b] = static_cast<double>(counts[b]) * inv;
    }
    // Every parity at once; entry [mask] is the signed mean over outcomes.
    walsh_hadamard(dist);
    for (const auto& [idx, mask] : group.entries) values[static_cast<Eigen::Index>(idx)] = dist[mask];
  }
  return values;
}

Eigen::VectorXd ObservableSet::measure_direct(const StateVector& state) const {
  Eigen::VectorXd values(observables_.size());
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] = expectation(state, observables_[i]);
  }
  return values;
}

Eigen::VectorXd measure_vector(const StateVector& state, const ObservableSet& observables,
                               const ShotConfig& shots, Rng& rng) {
  return observables.measure(state, shots, rng);
}

std::vector<std::size_t> default_feedback_selection(const FeedbackLayer& layer, unsigned n_qubits,
                                                    const ObservableSet& observables) {
  std::vector<std::size_t> sel;
  sel.reserve(layer.axes.size() * n_qubits);
  for (Pauli axis : layer.axes) {
    for (unsigned q = 0; q < n_qubits; ++q) {
      const auto idx = observables.index_of(PauliString(axis, {q}));
      if (!idx) {
        throw ConfigError(std::string("feedback needs <") + to_char(axis) + std::to_string(q) +
                          "> but it is not in the measurement scheme");
      }
      sel.push_back(*idx);
    }
  }
  return sel;
}

void resolve_feedback(CircuitSpec& spec, const ObservableSet& observables) {
  for (auto& layer : spec.layers) {
    if (auto* fb = std::get_if<FeedbackLayer>(&layer); fb && fb->selection.empty()) {
      fb->selection = default_feedback_selection(*fb, spec.n_qubits, observables);
    }
  }
}

}  // namespace hqrc
