#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "domino/equilibria.hpp"
#include "domino/model.hpp"
#include "domino/sde.hpp"

namespace domino {

struct NetworkSpec {
  /// "pair", "chain" or "explicit" (in_neighbours given directly).
  std::string builder = "pair";
  std::size_t n_nodes = 2;
  std::vector<std::vector<int>> in_neighbours;
  double beta = 0.0;
  double alpha = 0.03;

  Network build() const;
};

/// Square grid over [x_min, x_max]^2 with `points` samples per axis.
struct GridSpec {
  double x_min = -0.6;
  double x_max = 1.2;
  std::size_t points = 91;
};

struct KramersRequest {
  std::string well;
  std::string gate;
  int gate_count = 1;
};

struct AnalysisSpec {
  /// Subset of: ensemble, sequence_table, summary, paths.
  std::vector<std::string> emit{"ensemble", "sequence_table", "summary"};
  std::size_t histogram_bins = 50;
  /// Samples whose trajectories are written when "paths" is emitted.
  std::size_t path_samples = 4;
  BetaRange beta_range;
  GridSpec grid;
  std::vector<std::string> regimes;
  std::vector<KramersRequest> estimates;

  bool emits(const std::string& what) const;
};

struct ExperimentConfig {
  double nu = 0.01;
  NetworkSpec network;
  SimulationConfig simulation;
  AnalysisSpec analysis;
  std::filesystem::path output_dir = ".";

  NodeParams params() const { return NodeParams(nu); }
  Network net() const { return network.build(); }
};

/// Parses and validates an experiment document. Every failure, including
/// unknown keys and values the model rejects, throws ErrorKind::ConfigError.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Flat network document {"nu", "beta", "alpha", "in_neighbours"}.
std::pair<NodeParams, Network> parse_network_document(const std::string& json_text);

}  // namespace domino
