// Command-line front end: simulate | stats | bifurcate | kramers | potential-grid.
// Exit codes: 0 ok, 1 runtime fault, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "domino/config.hpp"
#include "domino/equilibria.hpp"
#include "domino/error.hpp"
#include "domino/io.hpp"
#include "domino/kramers.hpp"
#include "domino/sde.hpp"
#include "domino/stats.hpp"

namespace fs = std::filesystem;
using namespace domino;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string ensemble;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig load(const Options& opt) {
  ExperimentConfig cfg = load_experiment_config(opt.config);
  if (opt.seed) cfg.simulation.master_seed = *opt.seed;
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  return cfg;
}

fs::path prepare(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
  std::cout << "wrote " << path.string() << '\n';
}

void print_table(const SequenceStats& stats) {
  std::printf("%-12s %9s", "sequence", "P");
  const std::size_t n = stats.rows.empty() ? 0 : stats.rows.front().sequence.size();
  for (std::size_t k = 1; k <= n; ++k) std::printf("   E[t%zu|%zu]  CV", k, k - 1);
  std::printf("\n");
  for (const auto& row : stats.rows) {
    std::printf("%-12s %9.4f", format_sequence(row.sequence).c_str(), row.probability);
    for (const auto& g : row.gaps) std::printf(" %10.4g %5.2f", g.mean, g.cv);
    std::printf("\n");
  }
  std::printf("censored: %zu of %zu\n", stats.n_censored, stats.n_samples);
}

int cmd_simulate(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const NodeParams params = cfg.params();
  const Network net = cfg.net();
  const fs::path dir = prepare(cfg.output_dir);

  const Ensemble ensemble = monte_carlo(params, net, cfg.simulation, opt.threads);
  const auto recs = records(ensemble);
  const SequenceStats stats = sequence_table(recs);

  if (cfg.analysis.emits("ensemble")) {
    write_file(dir / "ensemble.csv", [&](std::ostream& o) { write_ensemble_csv(o, ensemble); });
  }
  if (cfg.analysis.emits("sequence_table")) {
    write_file(dir / "sequence_table.csv", [&](std::ostream& o) { write_sequence_table_csv(o, stats); });
  }
  if (cfg.analysis.emits("summary")) {
    write_file(dir / "summary.json", [&](std::ostream& o) {
      o << summary_json(recs, cfg.analysis.histogram_bins, ensemble.n_faulted);
    });
  }
  if (cfg.analysis.emits("paths")) {
    SimulationConfig sim = cfg.simulation;
    sim.record_paths = true;
    std::vector<SampleResult> traced;
    for (std::size_t i = 0; i < std::min(cfg.analysis.path_samples, sim.n_samples); ++i) {
      traced.push_back(run_sample(params, net, sim, i));
    }
    write_file(dir / "paths.csv", [&](std::ostream& o) { write_paths_csv(o, traced); });
  }
  print_table(stats);

  if (ensemble.n_faulted > 0) {
    for (const auto& s : ensemble.samples) {
      if (s.fault) {
        std::cerr << "domino: sample " << s.sample_index << ": " << *s.fault << '\n';
        break;
      }
    }
    std::cerr << "domino: " << ensemble.n_faulted << " samples hit an integration fault\n";
    return 1;
  }
  return 0;
}

int cmd_stats(const Options& opt) {
  std::size_t bins = 50;
  fs::path dir = ".";
  if (!opt.config.empty()) {
    const ExperimentConfig cfg = load(opt);
    bins = cfg.analysis.histogram_bins;
    dir = cfg.output_dir;
  }
  if (!opt.out.empty()) dir = opt.out;
  prepare(dir);

  std::ifstream in(opt.ensemble);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + opt.ensemble);
  const StoredEnsemble stored = read_ensemble_csv(in);
  const SequenceStats stats = sequence_table(stored.records);
  write_file(dir / "sequence_table.csv", [&](std::ostream& o) { write_sequence_table_csv(o, stats); });
  write_file(dir / "summary.json", [&](std::ostream& o) { o << summary_json(stored.records, bins); });
  print_table(stats);
  return 0;
}

int cmd_bifurcate(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const NodeParams params = cfg.params();
  const Network net = cfg.net();
  const fs::path dir = prepare(cfg.output_dir);
  const BetaRange& range = cfg.analysis.beta_range;

  std::vector<double> grid(range.points);
  for (std::size_t k = 0; k < range.points; ++k) {
    grid[k] = range.max * static_cast<double>(k) / static_cast<double>(range.points - 1);
  }
  const auto branches = continue_branches(params, net, grid);
  write_file(dir / "branches.csv", [&](std::ostream& o) { write_branches_csv(o, branches); });

  const RegimeBoundaries bounds = detect_boundaries(params, net, range);
  const std::string doc = boundaries_json(bounds, params, net);
  write_file(dir / "boundaries.json", [&](std::ostream& o) { o << doc; });
  std::cout << doc;
  return 0;
}

int cmd_kramers(const Options& opt) {
  using nlohmann::json;
  const ExperimentConfig cfg = load(opt);
  const NodeParams params = cfg.params();
  const Network net = cfg.net();
  const fs::path dir = prepare(cfg.output_dir);

  json doc = {{"nu", params.nu()}, {"beta", net.beta()}, {"alpha", net.alpha()}};
  doc["kramers_1d"] = kramers_1d(params, net.alpha());

  json estimates = json::array();
  for (const auto& req : cfg.analysis.estimates) {
    KramersEstimate est = eyring_kramers(labelled_equilibrium(params, net, req.well),
                                         labelled_equilibrium(params, net, req.gate), params, net,
                                         net.alpha());
    est.well_label = req.well;
    est.gate_label = req.gate;
    est.gate_count = req.gate_count;
    estimates.push_back(json::parse(estimate_json(est)));
  }
  doc["estimates"] = std::move(estimates);

  json regimes = json::array();
  for (const auto& name : cfg.analysis.regimes) {
    if (cfg.network.builder != "pair") {
      throw Error(ErrorKind::ConfigError, "regime compositions need the pair builder");
    }
    regimes.push_back(json::parse(regime_json(regime_T20(parse_regime(name), params, net.beta(), net.alpha()))));
  }
  doc["regimes"] = std::move(regimes);

  const std::string text = doc.dump(2) + "\n";
  write_file(dir / "estimates.json", [&](std::ostream& o) { o << text; });
  std::cout << text;
  return 0;
}

int cmd_potential_grid(const Options& opt) {
  const ExperimentConfig cfg = load(opt);
  const NodeParams params = cfg.params();
  const Network net = cfg.net();
  const fs::path dir = prepare(cfg.output_dir);

  // Validate before writing anything.
  std::ostringstream grid;
  write_potential_grid_csv(grid, params, net, cfg.analysis.grid);
  const auto equilibria = equilibria_at(params, net, net.beta());
  write_file(dir / "grid.csv", [&](std::ostream& o) { o << grid.str(); });
  write_file(dir / "equilibria.csv", [&](std::ostream& o) { write_equilibria_csv(o, equilibria); });
  std::cout << equilibria.size() << " equilibria at beta = " << net.beta() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Escape sequences of coupled bistable nodes"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "Experiment JSON")->check(CLI::ExistingFile);
    if (config_required) c->required();
    sub->add_option("--out", opt.out, "Output directory (overrides the config)");
    sub->add_option("--threads", opt.threads, "Worker threads, 0 = all cores (speed only)");
    sub->add_option("--seed", opt.seed, "Master seed (overrides the config)");
  };

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble, sequence table and summaries");
  common(simulate, true);
  auto* stats = app.add_subcommand("stats", "Re-derive summaries from a stored ensemble CSV");
  common(stats, false);
  stats->add_option("--ensemble", opt.ensemble, "ensemble.csv from a previous run")
      ->required()
      ->check(CLI::ExistingFile);
  auto* bifurcate = app.add_subcommand("bifurcate", "Continue equilibria in beta and locate boundaries");
  common(bifurcate, true);
  auto* kramers = app.add_subcommand("kramers", "Asymptotic escape-time estimates");
  common(kramers, true);
  auto* grid = app.add_subcommand("potential-grid", "Coupled potential of the pair on a grid");
  common(grid, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(opt);
    if (*stats) return cmd_stats(opt);
    if (*bifurcate) return cmd_bifurcate(opt);
    if (*kramers) return cmd_kramers(opt);
    if (*grid) return cmd_potential_grid(opt);
  } catch (const Error& e) {
    std::cerr << "domino: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "domino: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
