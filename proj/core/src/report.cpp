#include "hqrc/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hqrc/error.hpp"
#include "numfmt.hpp"

namespace hqrc {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

// Non-finite doubles become null, which JSON cannot otherwise carry.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

Eigen::VectorXd vec_from(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = num_from(a[i]);
  return v;
}

json pairs_json(const std::vector<ReturnPair>& pairs) {
  json a = json::array();
  for (const auto& [u, v] : pairs) a.push_back({num(u), num(v)});
  return a;
}

std::vector<ReturnPair> pairs_from(const json& a) {
  std::vector<ReturnPair> out;
  for (const auto& p : a) out.emplace_back(num_from(p.at(0)), num_from(p.at(1)));
  return out;
}

json summary_json(const RunSummary& r) {
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  json rmse = json::array();
  for (double v : r.rmse) rmse.push_back(num(v));
  json j = {
      {"config_hash", r.config_hash},
      {"seed", r.seed},
      {"label", r.label},
      {"mode", r.mode},
      {"params", params},
      {"vpt", {{"time", num(r.vpt.time)}, {"index", r.vpt.index}, {"censored", r.vpt.censored}}},
      {"rmse", rmse},
      {"return_map", {{"predicted", pairs_json(r.return_map_pred)},
                      {"truth", pairs_json(r.return_map_truth)},
                      {"fraction_inside", num(r.return_map_fraction)}}},
      {"attractor", {{"fraction_inside", num(r.overlap.fraction_inside)},
                     {"pred_mean", vec_json(r.overlap.pred_mean)},
                     {"pred_std", vec_json(r.overlap.pred_std)},
                     {"truth_mean", vec_json(r.overlap.truth_mean)},
                     {"truth_std", vec_json(r.overlap.truth_std)}}},
      {"reservoir_size", r.reservoir_size},
      {"normalizer_scale", num(r.normalizer_scale)},
      {"wall_seconds", num(r.wall_seconds)},
      {"error", r.error ? json(*r.error) : json(nullptr)},
  };
  return j;
}

RunSummary summary_from(const json& j) {
  RunSummary r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.label = j.value("label", "");
  r.mode = j.value("mode", "");
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items()) r.params.emplace_back(k, v.get<std::string>());
  const auto& vpt = j.at("vpt");
  r.vpt.time = num_from(vpt.at("time"));
  r.vpt.index = vpt.at("index").get<std::size_t>();
  r.vpt.censored = vpt.at("censored").get<bool>();
  if (j.contains("rmse"))
    for (const auto& v : j.at("rmse")) r.rmse.push_back(num_from(v));
  if (j.contains("return_map")) {
    const auto& rm = j.at("return_map");
    r.return_map_pred = pairs_from(rm.at("predicted"));
    r.return_map_truth = pairs_from(rm.at("truth"));
    r.return_map_fraction = num_from(rm.at("fraction_inside"));
  }
  if (j.contains("attractor")) {
    const auto& at = j.at("attractor");
    r.overlap.fraction_inside = num_from(at.at("fraction_inside"));
    r.overlap.pred_mean = vec_from(at.at("pred_mean"));
    r.overlap.pred_std = vec_from(at.at("pred_std"));
    r.overlap.truth_mean = vec_from(at.at("truth_mean"));
    r.overlap.truth_std = vec_from(at.at("truth_std"));
  }
  r.reservoir_size = j.value("reservoir_size", std::size_t{0});
  if (j.contains("normalizer_scale")) r.normalizer_scale = num_from(j.at("normalizer_scale"));
  if (j.contains("wall_seconds")) r.wall_seconds = num_from(j.at("wall_seconds"));
  if (j.contains("error") && !j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(num(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = n_rows ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != n_cols) throw ConfigError("ragged matrix in model record");
    for (Eigen::Index k = 0; k < n_cols; ++k) m(i, k) = num_from(row.at(static_cast<std::size_t>(k)));
  }
  return m;
}

}  // namespace

void write_summaries_csv(const std::string& path, const std::vector<RunSummary>& runs) {
  auto out = open_out(path);
  std::vector<std::string> keys;
  for (const auto& r : runs)
    for (const auto& [k, v] : r.params)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);

  out << "config_hash,label,seed,mode,vpt,vpt_index,censored,attractor_fraction,return_map_fraction,"
         "reservoir_size,wall_seconds,error";
  for (const auto& k : keys) out << ',' << csv_field(k);
  out << '\n';
  for (const auto& r : runs) {
    out << r.config_hash << ',' << csv_field(r.label) << ',' << r.seed << ',' << r.mode << ',';
    if (r.error) out << ",,,,,";
    else
      out << detail::Shortest{r.vpt.time} << ',' << r.vpt.index << ',' << (r.vpt.censored ? "true" : "false") << ','
          << detail::Shortest{r.overlap.fraction_inside} << ',' << detail::Shortest{r.return_map_fraction} << ',';
    out << r.reservoir_size << ',' << detail::Shortest{r.wall_seconds} << ',' << csv_field(r.error.value_or(""));
    for (const auto& k : keys) {
      std::string v;
      for (const auto& [pk, pv] : r.params)
        if (pk == k) v = pv;
      out << ',' << csv_field(v);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::string summaries_to_json(const std::vector<RunSummary>& runs) {
  json a = json::array();
  for (const auto& r : runs) a.push_back(summary_json(r));
  return a.dump(2);
}

std::vector<RunSummary> summaries_from_json(const std::string& text) {
  json a;
  try {
    a = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed summaries JSON: ") + e.what());
  }
  if (a.is_object() && a.contains("runs")) a = a.at("runs");
  if (!a.is_array()) throw ConfigError("summaries JSON must be an array of runs");
  std::vector<RunSummary> out;
  try {
    for (const auto& j : a) out.push_back(summary_from(j));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run summary: ") + e.what());
  }
  return out;
}

void write_summaries_json(const std::string& path, const std::vector<RunSummary>& runs) {
  auto out = open_out(path);
  out << summaries_to_json(runs) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<RunSummary> read_summaries_json(const std::string& path) {
  return summaries_from_json(slurp(path));
}

void write_aggregate_csv(const std::string& path, const std::vector<CellAggregate>& cells) {
  auto out = open_out(path);
  out << "label,config_hash,n,failures,mean,median,q1,q3,iqr,whisker_lo,whisker_hi,min,max\n";
  for (const auto& c : cells) {
    const auto& b = c.vpt;
    out << csv_field(c.label) << ',' << c.config_hash << ',' << b.n << ',' << c.failures;
    for (double v : {b.mean, b.median, b.q1, b.q3, b.iqr, b.whisker_lo, b.whisker_hi, b.min, b.max})
      out << ',' << detail::Shortest{v};
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_run_trajectory_csv(const std::string& path, const RunSummary& run,
                              const std::vector<std::string>& names) {
  if (!run.truth || !run.prediction) throw UsageError("run has no stored trajectories");
  const auto& truth = *run.truth;
  const auto& pred = *run.prediction;
  if (truth.dim() != pred.dim() || truth.length() != pred.length())
    throw UsageError("truth and prediction shapes differ");
  if (static_cast<Eigen::Index>(names.size()) != truth.dim())
    throw UsageError("component name count does not match trajectory dimension");
  const double scale = run.normalizer_scale;
  auto out = open_out(path);
  out << 't';
  for (const auto& n : names) out << ",truth_" << n;
  for (const auto& n : names) out << ",pred_" << n;
  out << '\n';
  for (Eigen::Index k = 0; k < truth.length(); ++k) {
    out << detail::Stamp{truth.t0 + static_cast<double>(k) * truth.dt};
    for (Eigen::Index d = 0; d < truth.dim(); ++d) out << ',' << detail::Shortest{truth.points(d, k) * scale};
    for (Eigen::Index d = 0; d < pred.dim(); ++d) out << ',' << detail::Shortest{pred.points(d, k) * scale};
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::string model_to_json(const ModelRecord& rec) {
  json j = {
      {"W_o", matrix_json(rec.model.w_out)},
      {"beta", rec.model.beta},
      {"train_steps", rec.model.train_steps},
      {"prune_steps", rec.model.prune_steps},
      {"normalizer_scale", rec.model.normalizer_scale},
      {"config_hash", hash_hex(rec.model.config_hash)},
      {"reservoir_state", vec_json(rec.state.r)},
      {"time_index", rec.state.t},
      {"last_input", vec_json(rec.last_input)},
  };
  return j.dump(2);
}

ModelRecord model_from_json(const std::string& text) {
  ModelRecord rec;
  try {
    const json j = json::parse(text);
    rec.model.w_out = matrix_from(j.at("W_o"));
    rec.model.beta = j.at("beta").get<double>();
    rec.model.train_steps = j.value("train_steps", std::size_t{0});
    rec.model.prune_steps = j.value("prune_steps", std::size_t{0});
    rec.model.normalizer_scale = j.at("normalizer_scale").get<double>();
    rec.model.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
    if (j.contains("reservoir_state")) rec.state.r = vec_from(j.at("reservoir_state"));
    rec.state.t = j.value("time_index", std::size_t{0});
    if (j.contains("last_input")) rec.last_input = vec_from(j.at("last_input"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model record: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("malformed config hash in model record: ") + e.what());
  }
  return rec;
}

void save_model(const std::string& path, const ModelRecord& record) {
  auto out = open_out(path);
  out << model_to_json(record) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

ModelRecord load_model(const std::string& path) { return model_from_json(slurp(path)); }

}  // namespace hqrc
