#include "hqrc/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "hqrc/error.hpp"

namespace hqrc {

double apply_feature_map(FeatureMap phi, double x) {
  constexpr double pi = std::numbers::pi;
  switch (phi) {
    case FeatureMap::Tanh: return std::tanh(x);
    case FeatureMap::PiTanh: return pi * std::tanh(x);
    case FeatureMap::PiSigmoid: return pi / (1.0 + std::exp(-x));
    case FeatureMap::Identity: return x;
    case FeatureMap::PiIdentity: return pi * x;
  }
  return x;
}

std::string_view to_string(FeatureMap phi) {
  switch (phi) {
    case FeatureMap::Tanh: return "tanh";
    case FeatureMap::PiTanh: return "pi_tanh";
    case FeatureMap::PiSigmoid: return "pi_sigmoid";
    case FeatureMap::Identity: return "identity";
    case FeatureMap::PiIdentity: return "pi_identity";
  }
  return "?";
}

FeatureMap feature_map_from_string(std::string_view name) {
  for (FeatureMap phi : kAllFeatureMaps) {
    if (to_string(phi) == name) return phi;
  }
  throw ConfigError("unknown feature map '" + std::string(name) + "'");
}

void QubitGraph::validate() const {
  for (const auto& [a, b] : edges) {
    if (a >= n_qubits || b >= n_qubits) {
      throw ConfigError("graph edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") out of range for " + std::to_string(n_qubits) + " qubits");
    }
    if (a == b) throw ConfigError("graph self-loop on qubit " + std::to_string(a));
  }
}

bool QubitGraph::is_matching() const {
  std::set<unsigned> seen;
  for (const auto& [a, b] : edges) {
    if (!seen.insert(a).second || !seen.insert(b).second) return false;
  }
  return true;
}

RingPartition ring_graph(unsigned n) {
  if (n < 2) throw ConfigError("ring graph needs at least 2 qubits");
  RingPartition p{{n, {}}, {n, {}}};
  if (n == 2) {
    p.ring1.edges.emplace_back(0, 1);
    return p;
  }
  for (unsigned i = 0; i < n; ++i) {
    const std::pair<unsigned, unsigned> e{i, (i + 1) % n};
    if (n % 2 == 1 && i == n - 1) {
      auto& smaller = p.ring2.edges.size() <= p.ring1.edges.size() ? p.ring2 : p.ring1;
      smaller.edges.push_back(e);
    } else if (i % 2 == 0) {
      p.ring1.edges.push_back(e);
    } else {
      p.ring2.edges.push_back(e);
    }
  }
  return p;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> CircuitSpec::encoding_dims() const {
  std::vector<std::size_t> dims;
  for (const auto& layer : layers) {
    if (const auto* enc = std::get_if<DataEncodingLayer>(&layer)) {
      if (enc->weight_id >= dims.size()) dims.resize(enc->weight_id + 1, 0);
      dims[enc->weight_id] = enc->parameter_count(n_qubits);
    }
  }
  return dims;
}

bool CircuitSpec::has_feedback() const {
  return std::any_of(layers.begin(), layers.end(), [](const LayerSpec& l) {
    return std::holds_alternative<FeedbackLayer>(l);
  });
}

FeedbackSource CircuitSpec::feedback_source() const {
  for (const auto& layer : layers) {
    if (const auto* fb = std::get_if<FeedbackLayer>(&layer)) return fb->source;
  }
  return FeedbackSource::Measurement;
}

void CircuitSpec::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw ConfigError("circuit qubit count out of range");
  for (const auto& layer : layers) {
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, DataEncodingLayer>) {
            if (l.axes.empty()) throw ConfigError("data-encoding layer without axes");
          } else if constexpr (std::is_same_v<T, CxLayer>) {
            if (l.graph.n_qubits != n_qubits) throw ConfigError("CX graph size mismatch");
            l.graph.validate();
          } else if constexpr (std::is_same_v<T, FeedbackLayer>) {
            if (!l.selection.empty() && l.selection.size() != l.axes.size() * n_qubits) {
              throw ConfigError("feedback selection has wrong length");
            }
          } else {
            if (l.angles.size() != l.axes.size() * n_qubits) {
              throw ConfigError("random block has wrong number of angles");
            }
            for (const auto& g : l.cx_rounds) g.validate();
          }
        },
        layer);
  }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == ',' || c == '\t' || c == '\n') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<Pauli> parse_axes(std::string_view s) {
  if (s.empty()) throw ConfigError("empty rotation axis list");
  std::vector<Pauli> axes;
  for (char c : s) axes.push_back(pauli_from_char(c));
  return axes;
}

}  // namespace

bool is_preset_name(std::string_view name) {
  return name == "L1" || name == "L2" || name == "L3" || name == "L4" || name == "L5" ||
         name == "fig2e";
}

std::string expand_preset(std::string_view preset, unsigned n_layers,
                          std::string_view rotation_cycle) {
  if (preset == "fig2e") return "R:X R:Y CX1 R:Z R:X CX2 R:Y";
  if (n_layers == 0) throw ConfigError("preset needs n_layers >= 1");
  if (rotation_cycle.empty()) throw ConfigError("empty rotation cycle");
  std::ostringstream os;
  auto l2 = [&] {
    for (unsigned k = 0; k < n_layers; ++k) {
      os << "R:" << rotation_cycle[k % rotation_cycle.size()] << (k % 2 == 0 ? " CX1 " : " CX2 ");
    }
  };
  if (preset == "L1") {
    for (unsigned k = 0; k < n_layers; ++k) os << "R:ZXZ CX1 CX2 ";
  } else if (preset == "L2") {
    l2();
  } else if (preset == "L3") {
    l2();
    os << "FB";
  } else if (preset == "L4") {
    l2();
    os << "FB RND";
  } else if (preset == "L5") {
    l2();
    os << "RND";
  } else {
    throw ConfigError("unknown circuit preset '" + std::string(preset) + "'");
  }
  return os.str();
}

CircuitSpec parse_layout(std::string_view layout, unsigned n_qubits, FeatureMap encode_phi,
                         FeatureMap feedback_phi, Rng& random_block_rng) {
  CircuitSpec spec;
  spec.n_qubits = n_qubits;
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw ConfigError("circuit qubit count out of range");

  std::optional<RingPartition> ring;
  auto rings = [&]() -> const RingPartition& {
    if (!ring) ring = ring_graph(n_qubits);
    return *ring;
  };

  std::size_t next_weight = 0;
  for (const auto& tok : tokenize(layout)) {
    if (tok.starts_with("R:")) {
      spec.layers.emplace_back(DataEncodingLayer{parse_axes(tok.substr(2)), encode_phi, next_weight++});
    } else if (tok == "CX1") {
      spec.layers.emplace_back(CxLayer{rings().ring1});
    } else if (tok == "CX2") {
      spec.layers.emplace_back(CxLayer{rings().ring2});
    } else if (tok == "FB" || tok == "FBr") {
      FeedbackLayer fb;
      fb.source = tok == "FB" ? FeedbackSource::Measurement : FeedbackSource::Reservoir;
      fb.phi = feedback_phi;
      spec.layers.emplace_back(std::move(fb));
    } else if (tok == "RND") {
      RandomLayer rnd;
      std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
      rnd.angles.resize(rnd.axes.size() * n_qubits);
      for (auto& a : rnd.angles) a = angle(random_block_rng);
      if (n_qubits >= 2) rnd.cx_rounds = {rings().ring1, rings().ring2};
      spec.layers.emplace_back(std::move(rnd));
    } else {
      throw ConfigError("unknown layer token '" + tok + "'");
    }
  }
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd encode_input(const Eigen::MatrixXd& w_in, const Eigen::VectorXd& x,
                             FeatureMap phi) {
  if (w_in.cols() != x.size()) {
    throw ConfigError("encode_input: W_in has " + std::to_string(w_in.cols()) +
                      " columns but input has " + std::to_string(x.size()) + " entries");
  }
  Eigen::VectorXd y = w_in * x;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = apply_feature_map(phi, y[i]);
  return y;
}

std::vector<double> feedback_angles(std::span<const double> source,
                                    std::span<const std::size_t> selection, FeatureMap phi) {
  std::vector<double> angles(selection.size());
  for (std::size_t k = 0; k < selection.size(); ++k) {
    double v = 0.0;
    if (!source.empty()) {
      if (selection[k] >= source.size()) {
        throw ConfigError("feedback selection index " + std::to_string(selection[k]) +
                          " out of range for source of length " + std::to_string(source.size()));
      }
      v = source[selection[k]];
    }
    angles[k] = apply_feature_map(phi, v);
  }
  return angles;
}

std::vector<GateOp> build_circuit(const CircuitSpec& spec, const Eigen::VectorXd& x,
                                  std::span<const double> feedback,
                                  std::span<const Eigen::MatrixXd> w_in) {
  const unsigned n = spec.n_qubits;
  std::vector<GateOp> gates;
  for (const auto& layer : spec.layers) {
    if (const auto* enc = std::get_if<DataEncodingLayer>(&layer)) {
      if (enc->weight_id >= w_in.size()) {
        throw ConfigError("missing W_in for data-encoding layer " + std::to_string(enc->weight_id));
      }
      const auto& w = w_in[enc->weight_id];
      if (static_cast<std::size_t>(w.rows()) != enc->parameter_count(n)) {
        throw ConfigError("W_in for layer " + std::to_string(enc->weight_id) + " has " +
                          std::to_string(w.rows()) + " rows, expected " +
                          std::to_string(enc->parameter_count(n)));
      }
      const Eigen::VectorXd angles = encode_input(w, x, enc->phi);
      for (std::size_t a = 0; a < enc->axes.size(); ++a) {
        for (unsigned q = 0; q < n; ++q) {
          gates.push_back(GateOp::rotation(enc->axes[a], q, angles[a * n + q]));
        }
      }
    } else if (const auto* cx = std::get_if<CxLayer>(&layer)) {
      for (const auto& [c, t] : cx->graph.edges) gates.push_back(GateOp::cx(c, t));
    } else if (const auto* fb = std::get_if<FeedbackLayer>(&layer)) {
      if (fb->selection.size() != fb->axes.size() * n) {
        throw ConfigError("feedback layer selection is unresolved");
      }
      const auto angles = feedback_angles(feedback, fb->selection, fb->phi);
      for (std::size_t a = 0; a < fb->axes.size(); ++a) {
        for (unsigned q = 0; q < n; ++q) {
          gates.push_back(GateOp::rotation(fb->axes[a], q, angles[a * n + q]));
        }
      }
    } else if (const auto* rnd = std::get_if<RandomLayer>(&layer)) {
      for (std::size_t a = 0; a < rnd->axes.size(); ++a) {
        for (unsigned q = 0; q < n; ++q) {
          gates.push_back(GateOp::rotation(rnd->axes[a], q, rnd->angles[a * n + q]));
        }
      }
      for (const auto& g : rnd->cx_rounds) {
        for (const auto& [c, t] : g.edges) gates.push_back(GateOp::cx(c, t));
      }
    }
  }
  return gates;
}

}  // namespace hqrc
