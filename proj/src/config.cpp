#include "domino/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "domino/error.hpp"
#include "domino/kramers.hpp"

namespace domino {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigError, where + ": " + what);
}

void only_keys(const json& obj, const std::string& where,
               std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

const json& member(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where, std::string("missing '") + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

std::uint64_t whole(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) fail(where, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

template <class T>
void optional_field(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const std::string at = where + "." + key;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, double>) {
    out = number(v, at);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(at, "expected true or false");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    out = text(v, at);
  } else {
    out = static_cast<T>(whole(v, at));
  }
}

std::vector<std::vector<int>> adjacency(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of arrays");
  std::vector<std::vector<int>> out;
  for (const auto& row : v) {
    if (!row.is_array()) fail(where, "expected an array of arrays");
    std::vector<int> nbrs;
    for (const auto& j : row) {
      if (!j.is_number_integer()) fail(where, "neighbour indices must be integers");
      nbrs.push_back(j.get<int>());
    }
    out.push_back(std::move(nbrs));
  }
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed JSON: ") + e.what());
  }
}

// Re-raises model validation failures as configuration errors.
template <class F>
auto validated(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    fail(where, e.what());
  }
}

NetworkSpec parse_network(const json& obj) {
  const std::string where = "network";
  only_keys(obj, where, {"builder", "n_nodes", "in_neighbours", "beta", "alpha"});
  NetworkSpec spec;
  spec.beta = number(member(obj, where, "beta"), where + ".beta");
  spec.alpha = number(member(obj, where, "alpha"), where + ".alpha");
  if (obj.contains("in_neighbours")) {
    if (obj.contains("builder") || obj.contains("n_nodes")) {
      fail(where, "give either a builder or in_neighbours, not both");
    }
    spec.builder = "explicit";
    spec.in_neighbours = adjacency(obj.at("in_neighbours"), where + ".in_neighbours");
    spec.n_nodes = spec.in_neighbours.size();
  } else {
    spec.builder = text(member(obj, where, "builder"), where + ".builder");
    if (spec.builder == "pair") {
      if (obj.contains("n_nodes")) fail(where, "the pair builder takes no n_nodes");
    } else if (spec.builder == "chain") {
      spec.n_nodes = static_cast<std::size_t>(whole(member(obj, where, "n_nodes"), where + ".n_nodes"));
    } else {
      fail(where + ".builder", "expected \"pair\" or \"chain\", got \"" + spec.builder + "\"");
    }
  }
  validated(where, [&] { return spec.build(); });
  return spec;
}

SimulationConfig parse_simulation(const json& obj) {
  const std::string where = "simulation";
  only_keys(obj, where, {"dt", "t_max", "xi", "master_seed", "n_samples", "record_paths",
                         "path_stride", "noise_substeps"});
  SimulationConfig sim;
  optional_field(obj, "dt", sim.dt, where);
  optional_field(obj, "t_max", sim.t_max, where);
  optional_field(obj, "xi", sim.xi, where);
  optional_field(obj, "master_seed", sim.master_seed, where);
  optional_field(obj, "n_samples", sim.n_samples, where);
  optional_field(obj, "record_paths", sim.record_paths, where);
  optional_field(obj, "path_stride", sim.path_stride, where);
  optional_field(obj, "noise_substeps", sim.noise_substeps, where);
  return sim;
}

AnalysisSpec parse_analysis(const json& obj) {
  const std::string where = "analysis";
  only_keys(obj, where, {"emit", "histogram_bins", "path_samples", "beta_range", "grid",
                         "regimes", "estimates"});
  AnalysisSpec spec;
  if (obj.contains("emit")) {
    const json& list = obj.at("emit");
    if (!list.is_array()) fail(where + ".emit", "expected an array of names");
    spec.emit.clear();
    for (const auto& item : list) {
      const std::string name = text(item, where + ".emit");
      if (name != "ensemble" && name != "sequence_table" && name != "summary" && name != "paths") {
        fail(where + ".emit", "unknown output '" + name + "'");
      }
      spec.emit.push_back(name);
    }
  }
  optional_field(obj, "histogram_bins", spec.histogram_bins, where);
  if (spec.histogram_bins == 0) fail(where + ".histogram_bins", "must be >= 1");
  optional_field(obj, "path_samples", spec.path_samples, where);

  if (obj.contains("beta_range")) {
    const std::string at = where + ".beta_range";
    const json& r = obj.at("beta_range");
    only_keys(r, at, {"min", "max", "points"});
    optional_field(r, "min", spec.beta_range.min, at);
    optional_field(r, "max", spec.beta_range.max, at);
    optional_field(r, "points", spec.beta_range.points, at);
    if (!(spec.beta_range.min >= 0.0) || !(spec.beta_range.max > spec.beta_range.min)) {
      fail(at, "empty range: need 0 <= min < max");
    }
    if (spec.beta_range.points < 2) fail(at, "need at least 2 points");
  }
  if (obj.contains("grid")) {
    const std::string at = where + ".grid";
    const json& g = obj.at("grid");
    only_keys(g, at, {"x_min", "x_max", "points"});
    optional_field(g, "x_min", spec.grid.x_min, at);
    optional_field(g, "x_max", spec.grid.x_max, at);
    optional_field(g, "points", spec.grid.points, at);
    if (spec.grid.points == 0) fail(at, "need at least 1 point");
    if (!(spec.grid.x_max >= spec.grid.x_min)) fail(at, "need x_min <= x_max");
  }
  if (obj.contains("regimes")) {
    const json& list = obj.at("regimes");
    if (!list.is_array()) fail(where + ".regimes", "expected an array of names");
    for (const auto& item : list) {
      const std::string name = text(item, where + ".regimes");
      validated(where + ".regimes", [&] { return parse_regime(name); });
      spec.regimes.push_back(name);
    }
  }
  if (obj.contains("estimates")) {
    const json& list = obj.at("estimates");
    if (!list.is_array()) fail(where + ".estimates", "expected an array");
    for (const auto& item : list) {
      const std::string at = where + ".estimates";
      only_keys(item, at, {"well", "gate", "gate_count"});
      KramersRequest req;
      req.well = text(member(item, at, "well"), at + ".well");
      req.gate = text(member(item, at, "gate"), at + ".gate");
      std::uint64_t g = 1;
      optional_field(item, "gate_count", g, at);
      if (g < 1) fail(at + ".gate_count", "must be >= 1");
      req.gate_count = static_cast<int>(g);
      spec.estimates.push_back(req);
    }
  }
  return spec;
}

}  // namespace

Network NetworkSpec::build() const {
  if (builder == "pair") return Network::pair(beta, alpha);
  if (builder == "chain") return Network::chain(n_nodes, beta, alpha);
  return Network(in_neighbours, beta, alpha);
}

bool AnalysisSpec::emits(const std::string& what) const {
  return std::find(emit.begin(), emit.end(), what) != emit.end();
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json doc = parse_json(json_text);
  only_keys(doc, "config", {"model", "network", "simulation", "analysis", "output_dir"});

  ExperimentConfig cfg;
  const json& model = member(doc, "config", "model");
  only_keys(model, "model", {"nu"});
  cfg.nu = number(member(model, "model", "nu"), "model.nu");
  const NodeParams params = validated("model", [&] { return NodeParams(cfg.nu); });

  cfg.network = parse_network(member(doc, "config", "network"));
  if (doc.contains("simulation")) cfg.simulation = parse_simulation(doc.at("simulation"));
  validated("simulation", [&] {
    cfg.simulation.validate(params);
    return 0;
  });
  if (doc.contains("analysis")) cfg.analysis = parse_analysis(doc.at("analysis"));
  if (doc.contains("output_dir")) cfg.output_dir = text(doc.at("output_dir"), "output_dir");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::pair<NodeParams, Network> parse_network_document(const std::string& json_text) {
  const json doc = parse_json(json_text);
  const std::string where = "network document";
  only_keys(doc, where, {"nu", "beta", "alpha", "in_neighbours"});
  const double nu = number(member(doc, where, "nu"), where + ".nu");
  const double beta = number(member(doc, where, "beta"), where + ".beta");
  const double alpha = number(member(doc, where, "alpha"), where + ".alpha");
  auto nbrs = adjacency(member(doc, where, "in_neighbours"), where + ".in_neighbours");
  return validated(where, [&] {
    return std::pair<NodeParams, Network>{NodeParams(nu), Network(std::move(nbrs), beta, alpha)};
  });
}

}  // namespace domino
