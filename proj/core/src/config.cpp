#include "hqrc/config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hqrc/error.hpp"

namespace hqrc {

using json = nlohmann::json;

std::string_view to_string(Mode m) { return m == Mode::Hqrc ? "hqrc" : "classical-esn"; }

Mode mode_from_string(std::string_view name) {
  if (name == "hqrc") return Mode::Hqrc;
  if (name == "classical-esn" || name == "esn") return Mode::ClassicalEsn;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::string CircuitConfig::resolved_layout() const {
  if (!layout.empty()) return layout;
  return expand_preset(preset, n_layers, rotation_cycle);
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  const json& s = root.at(key);
  if (!s.is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return s;
}

std::string axes_string(const std::vector<Pauli>& axes) {
  std::string s;
  for (Pauli p : axes) s += to_char(p);
  return s;
}

json to_json(const ExperimentConfig& c, bool include_seeds) {
  json j;
  j["mode"] = std::string(to_string(c.mode));

  json sys;
  sys["kind"] = std::string(to_string(c.system.kind));
  if (c.system.initial_condition) {
    const auto& ic = *c.system.initial_condition;
    sys["initial_condition"] = {ic[0], ic[1], ic[2]};
  } else {
    sys["initial_condition"] = nullptr;
  }
  sys["dt"] = c.system.dt;
  sys["train_steps"] = c.system.train_steps;
  sys["prune_steps"] = c.system.prune_steps;
  sys["test_steps"] = c.system.test_steps;
  sys["transient_steps"] = c.system.transient_steps;
  sys["self_term_sign"] = c.system.self_term_sign;
  sys["substeps"] = c.system.substeps > 0 ? c.system.substeps
                                          : (c.system.kind == SystemKind::Lorenz63 ? 1u : 25u);
  j["system"] = sys;

  json circ;
  circ["preset"] = c.circuit.preset;
  circ["layout"] = c.circuit.layout;
  circ["n_qubits"] = c.circuit.n_qubits;
  circ["n_layers"] = c.circuit.n_layers;
  circ["feature_map"] = std::string(to_string(c.circuit.feature_map));
  circ["feedback_map"] = std::string(to_string(c.circuit.feedback_map));
  circ["rotation_cycle"] = c.circuit.rotation_cycle;
  j["circuit"] = circ;

  json meas;
  meas["axes"] = axes_string(c.measurement.axes);
  meas["max_order"] = c.measurement.max_order;
  if (c.measurement.connectivity) {
    json edges = json::array();
    for (auto [a, b] : c.measurement.connectivity->edges) edges.push_back({a, b});
    meas["connectivity"] = edges;
  } else {
    meas["connectivity"] = "all-to-all";
  }
  j["measurement"] = meas;

  json res;
  res["leak"] = c.activations.leak;
  res["n_res"] = c.n_res;
  res["activations"] = {
      {"f_r", std::string(to_string(c.activations.f_r))},
      {"f_M", std::string(to_string(c.activations.f_m))},
      {"f_X", std::string(to_string(c.activations.f_x))},
      {"g", std::string(to_string(c.activations.g))},
      {"f_R", std::string(to_string(c.activations.f_readout))},
      {"h_X", std::string(to_string(c.activations.h_x))},
  };
  res["weights"] = {
      {"w_in", std::string(to_string(c.weights.w_in))},
      {"w_r", std::string(to_string(c.weights.w_r))},
      {"w_m", std::string(to_string(c.weights.w_m))},
      {"w_x", std::string(to_string(c.weights.w_x))},
  };
  j["reservoir"] = res;

  j["esn"] = {
      {"n_res", c.esn.n_res},
      {"activation", std::string(to_string(c.esn.activation))},
      {"reservoir_scale", c.esn.reservoir_scale},
      {"input_scale", c.esn.input_scale},
  };
  j["readout"] = {{"beta", c.beta}};
  json shots;
  if (c.shots) {
    shots["shots"] = *c.shots;
  } else {
    shots["shots"] = "exact";
  }
  shots["sigma"] = c.sigma;
  j["shots"] = shots;
  j["metrics"] = {{"epsilon", c.epsilon}, {"return_map_component", c.return_map_component}};
  if (include_seeds) j["seeds"] = c.seeds;
  return j;
}

// Every key in `given` must also appear in `schema`.
void reject_unknown_keys(const json& given, const json& schema, const std::string& where) {
  for (const auto& [key, value] : given.items()) {
    if (!schema.contains(key)) throw ConfigError("unknown config key '" + where + "/" + key + "'");
    if (value.is_object() && schema.at(key).is_object()) reject_unknown_keys(value, schema.at(key), where + "/" + key);
  }
}

ExperimentConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(j, to_json(ExperimentConfig{}, true), "");
  ExperimentConfig c;
  c.mode = mode_from_string(get_or<std::string>(j, "mode", "hqrc"));

  const json& sys = section(j, "system");
  c.system.kind = system_kind_from_string(get_or<std::string>(sys, "kind", "lorenz63"));
  const double default_dt = c.system.kind == SystemKind::Lorenz63 ? 0.01 : 0.25;
  if (sys.contains("initial_condition") && !sys.at("initial_condition").is_null()) {
    const auto ic = sys.at("initial_condition").get<std::vector<double>>();
    if (ic.size() != 3) throw ConfigError("initial_condition needs 3 entries");
    c.system.initial_condition = Vec3(ic[0], ic[1], ic[2]);
  }
  c.system.dt = get_or<double>(sys, "dt", default_dt);
  c.system.train_steps = get_or<std::size_t>(sys, "train_steps", c.system.train_steps);
  c.system.prune_steps = get_or<std::size_t>(sys, "prune_steps", c.system.prune_steps);
  c.system.test_steps = get_or<std::size_t>(sys, "test_steps", c.system.test_steps);
  c.system.transient_steps = get_or<std::size_t>(sys, "transient_steps", 0);
  c.system.self_term_sign = get_or<double>(sys, "self_term_sign", 1.0);
  c.system.substeps = get_or<unsigned>(sys, "substeps", c.system.kind == SystemKind::Lorenz63 ? 1 : 25);
  if (c.system.substeps == 0) throw ConfigError("system.substeps must be positive");
  if (!(c.system.dt > 0)) throw ConfigError("system.dt must be positive");
  if (c.system.prune_steps >= c.system.train_steps) {
    throw ConfigError("system.prune_steps must be smaller than system.train_steps");
  }

  const json& circ = section(j, "circuit");
  c.circuit.preset = get_or<std::string>(circ, "preset", c.circuit.preset);
  c.circuit.layout = get_or<std::string>(circ, "layout", "");
  c.circuit.n_qubits = get_or<unsigned>(circ, "n_qubits", c.circuit.n_qubits);
  c.circuit.n_layers = get_or<unsigned>(circ, "n_layers", c.circuit.n_layers);
  c.circuit.feature_map = feature_map_from_string(get_or<std::string>(circ, "feature_map", "tanh"));
  c.circuit.feedback_map =
      feature_map_from_string(get_or<std::string>(circ, "feedback_map", "identity"));
  c.circuit.rotation_cycle = get_or<std::string>(circ, "rotation_cycle", c.circuit.rotation_cycle);
  if (c.circuit.layout.empty() && !is_preset_name(c.circuit.preset)) {
    throw ConfigError("unknown circuit preset '" + c.circuit.preset + "'");
  }

  const json& meas = section(j, "measurement");
  {
    const auto axes = get_or<std::string>(meas, "axes", "XYZ");
    c.measurement.axes.clear();
    for (char ch : axes) c.measurement.axes.push_back(pauli_from_char(ch));
    c.measurement.max_order = get_or<unsigned>(meas, "max_order", 2);
    if (meas.contains("connectivity") && meas.at("connectivity").is_array()) {
      QubitGraph g{c.circuit.n_qubits, {}};
      for (const auto& e : meas.at("connectivity")) {
        const auto pair = e.get<std::vector<unsigned>>();
        if (pair.size() != 2) throw ConfigError("connectivity edges need two endpoints");
        g.edges.emplace_back(pair[0], pair[1]);
      }
      c.measurement.connectivity = g;
    } else if (meas.contains("connectivity") &&
               get_or<std::string>(meas, "connectivity", "all-to-all") != "all-to-all") {
      throw ConfigError("measurement.connectivity must be \"all-to-all\" or an edge list");
    }
  }

  const json& res = section(j, "reservoir");
  c.activations.leak = get_or<double>(res, "leak", 0.7);
  if (!(c.activations.leak >= 0 && c.activations.leak <= 1)) throw ConfigError("leak must lie in [0, 1]");
  c.n_res = get_or<std::size_t>(res, "n_res", 0);
  {
    const json& acts = section(res, "activations");
    auto act = [&](const char* key, Activation fallback) {
      return activation_from_string(get_or<std::string>(acts, key, std::string(to_string(fallback))));
    };
    c.activations.f_r = act("f_r", Activation::Identity);
    c.activations.f_m = act("f_M", Activation::Identity);
    c.activations.f_x = act("f_X", Activation::Identity);
    c.activations.g = act("g", Activation::Identity);
    c.activations.f_readout = act("f_R", Activation::Tanh);
    c.activations.h_x = act("h_X", Activation::Tanh);

    const json& w = section(res, "weights");
    auto dist = [&](const char* key, WeightDistribution fallback) {
      return weight_distribution_from_string(
          get_or<std::string>(w, key, std::string(to_string(fallback))));
    };
    c.weights.w_in = dist("w_in", WeightDistribution::StandardNormal);
    c.weights.w_r = dist("w_r", WeightDistribution::StandardNormal);
    c.weights.w_m = dist("w_m", WeightDistribution::Identity);
    c.weights.w_x = dist("w_x", WeightDistribution::StandardNormal);
  }

  const json& esn = section(j, "esn");
  c.esn.n_res = get_or<std::size_t>(esn, "n_res", c.esn.n_res);
  c.esn.activation = activation_from_string(get_or<std::string>(esn, "activation", "tanh"));
  c.esn.reservoir_scale = get_or<double>(esn, "reservoir_scale", 1.0);
  c.esn.input_scale = get_or<double>(esn, "input_scale", 1.0);

  c.beta = get_or<double>(section(j, "readout"), "beta", c.beta);
  if (!(c.beta >= 0)) throw ConfigError("readout.beta must be nonnegative");

  const json& shots = section(j, "shots");
  if (shots.contains("shots")) {
    const json& s = shots.at("shots");
    if (s.is_string()) {
      if (s.get<std::string>() != "exact") throw ConfigError("shots must be an integer or \"exact\"");
    } else if (s.is_number_integer() && s.get<long long>() > 0) {
      c.shots = s.get<std::uint64_t>();
    } else if (!s.is_null()) {
      throw ConfigError("shots must be a positive integer or \"exact\"");
    }
  }
  c.sigma = get_or<double>(shots, "sigma", 0.0);
  if (!(c.sigma >= 0)) throw ConfigError("shots.sigma must be nonnegative");

  const json& met = section(j, "metrics");
  c.epsilon = get_or<double>(met, "epsilon", 0.3);
  c.return_map_component = get_or<unsigned>(met, "return_map_component", 2);
  if (c.return_map_component > 2) throw ConfigError("metrics.return_map_component must be 0..2");

  if (j.contains("seeds")) {
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
  }
  return c;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  try {
    return from_json(parse_json(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string to_canonical_json(const ExperimentConfig& cfg, bool include_seeds) {
  return to_json(cfg, include_seeds).dump();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_canonical_json(cfg, false);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

ExperimentConfig with_override(const ExperimentConfig& cfg, std::string_view pointer,
                               std::string_view json_value) {
  json j = to_json(cfg, true);
  try {
    const json::json_pointer ptr{std::string(pointer)};
    if (!j.contains(ptr)) throw ConfigError("override path '" + std::string(pointer) + "' does not exist");
    j[ptr] = parse_json(json_value);
  } catch (const json::exception& e) {
    throw ConfigError("override '" + std::string(pointer) + "': " + e.what());
  }
  return from_json(j);
}

SweepGrid parse_sweep(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw ConfigError("sweep file must be a JSON object");
  SweepGrid grid;
  try {
    grid.base = from_json(j.contains("base") ? j.at("base") : json::object());
    if (j.contains("axes")) {
      const json& axes = j.at("axes");
      auto add_axis = [&](const std::string& path, const json& values) {
        if (!values.is_array() || values.empty()) {
          throw ConfigError("sweep axis '" + path + "' needs a nonempty value list");
        }
        SweepAxis axis{path, {}};
        for (const auto& v : values) axis.values.push_back(v.dump());
        grid.axes.push_back(std::move(axis));
      };
      if (axes.is_object()) {
        for (const auto& [path, values] : axes.items()) add_axis(path, values);
      } else {
        for (const auto& a : axes) add_axis(a.at("path").get<std::string>(), a.at("values"));
      }
    }
    if (j.contains("seeds")) grid.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  return grid;
}

SweepGrid load_sweep(const std::string& path) { return parse_sweep(read_file(path)); }

}  // namespace hqrc
