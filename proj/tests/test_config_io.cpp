#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "domino/config.hpp"
#include "domino/error.hpp"
#include "domino/io.hpp"

using namespace domino;
using nlohmann::json;

namespace {

void expect_config_error(const std::string& text) {
  try {
    parse_experiment_config(text);
    FAIL("accepted: " << text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
  }
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("config_io") {
  TEST_CASE("full experiment document") {
    const ExperimentConfig cfg = parse_experiment_config(R"({
      "model": {"nu": 0.05},
      "network": {"builder": "chain", "n_nodes": 4, "beta": 0.1, "alpha": 0.04},
      "simulation": {"dt": 0.005, "t_max": 500, "master_seed": 9, "n_samples": 12,
                     "noise_substeps": 2},
      "analysis": {"emit": ["ensemble", "paths"], "histogram_bins": 7,
                   "beta_range": {"min": 0, "max": 0.2, "points": 21},
                   "regimes": ["weak"], "estimates": [{"well": "QQ", "gate": "QS", "gate_count": 2}]},
      "output_dir": "somewhere"
    })");
    CHECK(cfg.nu == 0.05);
    CHECK(cfg.net().n_nodes() == 4);
    CHECK_FALSE(cfg.net().symmetric());
    CHECK(cfg.net().alpha() == 0.04);
    CHECK(cfg.simulation.dt == 0.005);
    CHECK(cfg.simulation.noise_substeps == 2);
    CHECK(cfg.simulation.xi == 0.5);
    CHECK(cfg.analysis.emits("paths"));
    CHECK_FALSE(cfg.analysis.emits("summary"));
    CHECK(cfg.analysis.beta_range.points == 21);
    REQUIRE(cfg.analysis.estimates.size() == 1);
    CHECK(cfg.analysis.estimates[0].gate_count == 2);
    CHECK(cfg.output_dir == "somewhere");
  }

  TEST_CASE("defaults fill a minimal document") {
    const ExperimentConfig cfg = parse_experiment_config(
        R"({"model": {"nu": 0.01}, "network": {"builder": "pair", "beta": 0, "alpha": 0.03}})");
    CHECK(cfg.simulation.dt == 0.01);
    CHECK(cfg.simulation.t_max == 1.0e5);
    CHECK(cfg.net().n_nodes() == 2);
    CHECK(cfg.analysis.emits("ensemble"));
    CHECK(cfg.analysis.histogram_bins == 50);
  }

  TEST_CASE("bad documents are configuration errors") {
    expect_config_error("not json");
    expect_config_error("{}");
    expect_config_error(R"({"model": {"nu": 0.01}})");
    expect_config_error(R"({"modle": {"nu": 0.01}})");
    expect_config_error(R"({"model": {"nu": 0.01, "mu": 1}})");
    expect_config_error(R"({"model": {"nu": 1.5}})");
    expect_config_error(R"({"model": {"nu": "small"}})");
    expect_config_error(R"({"network": {"builder": "star"}})");
    expect_config_error(R"({"network": {"beta": -0.1}})");
    expect_config_error(R"({"network": {"builder": "explicit", "in_neighbours": [[5], []]}})");
    expect_config_error(R"({"simulation": {"n_samples": 0}})");
    expect_config_error(R"({"simulation": {"dt": -0.01}})");
    expect_config_error(R"({"simulation": {"xi": 0.05}})");
    expect_config_error(R"({"analysis": {"emit": ["pictures"]}})");
    expect_config_error(R"({"analysis": {"beta_range": {"min": 0.3, "max": 0.1}}})");
    expect_config_error(R"({"analysis": {"grid": {"points": 0}}})");
    expect_config_error(R"({"analysis": {"regimes": ["medium"]}})");
    try {
      load_experiment_config("/nonexistent/domino.json");
      FAIL("loaded a missing file");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ConfigError);
    }
  }

  TEST_CASE("shipped configurations load") {
    for (const char* name : {"chain_beta0.json", "chain_beta0.1.json", "chain_beta0.4.json", "chain.json",
                             "pair.json", "pair_levelsets_a.json", "pair_levelsets_d.json"}) {
      CAPTURE(name);
      CHECK_NOTHROW(load_experiment_config(std::string(DOMINO_CONFIG_DIR) + "/" + name));
    }
  }

  TEST_CASE("flat network document") {
    const auto [params, net] =
        parse_network_document(R"({"nu": 0.02, "beta": 0.3, "alpha": 0.05, "in_neighbours": [[1], [0]]})");
    CHECK(params.nu() == 0.02);
    CHECK(net.beta() == 0.3);
    CHECK(net.symmetric());
    CHECK_THROWS_AS(parse_network_document(R"({"nu": 0.02, "beta": 0.3})"), Error);
  }

  TEST_CASE("ensemble CSV round-trips exactly") {
    Ensemble ens;
    const std::vector<std::vector<std::optional<double>>> latched{
        {0.1 + 0.2, 1.0 / 3.0, 123456.789},
        {std::nullopt, 5.5, 2.25},
        {7.0, 7.0, 1e-7},
    };
    for (std::size_t k = 0; k < latched.size(); ++k) {
      SampleResult s;
      s.sample_index = 10 + k;
      s.record = build_record(latched[k], 1.0e5);
      ens.samples.push_back(s);
    }
    ens.n_censored = 1;
    std::stringstream buf;
    write_ensemble_csv(buf, ens);
    const auto rows = lines(buf.str());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "sample_index,censored,tau_1,tau_2,tau_3,sequence,gap_1,gap_2,gap_3");
    CHECK(rows[2].rfind("11,1,100000,5.5,2.25,\"(3, 2)\",2.25,3.25,", 0) == 0);

    const StoredEnsemble back = read_ensemble_csv(buf);
    REQUIRE(back.records.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(back.sample_index[k] == 10 + k);
      CHECK(back.records[k] == ens.samples[k].record);
    }
    std::istringstream junk("sample_index,censored\n1,2,3\n");
    CHECK_THROWS_AS(read_ensemble_csv(junk), Error);
  }

  TEST_CASE("sequence table CSV layout") {
    const std::vector<EscapeRecord> recs{build_record(std::vector<std::optional<double>>{2.0, 1.0}, 10.0),
                                         build_record(std::vector<std::optional<double>>{4.0, 1.0}, 10.0)};
    std::stringstream buf;
    write_sequence_table_csv(buf, sequence_table(recs));
    const auto rows = lines(buf.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "sequence,count,probability,gap1_mean,gap1_sd,gap1_cv,gap2_mean,gap2_sd,gap2_cv");
    CHECK(rows[1].rfind("\"(2, 1)\",2,1,1,0,0,2,", 0) == 0);
  }

  TEST_CASE("summary JSON carries the documented fields") {
    const std::vector<EscapeRecord> recs{build_record(std::vector<std::optional<double>>{2.0, 1.0}, 10.0),
                                         build_record(std::vector<std::optional<double>>{1.0, 3.0}, 10.0),
                                         build_record(std::vector<std::optional<double>>{std::nullopt, 3.0}, 10.0)};
    const json doc = json::parse(summary_json(recs, 5, 0));
    CHECK(doc["n_samples"] == 3);
    CHECK(doc["n_censored"] == 1);
    CHECK(doc["nodes"].size() == 2);
    CHECK(doc["nodes"][0]["quantiles"].contains("q50"));
    CHECK(doc["nodes"][0]["histogram"]["counts"].size() == 5);
    CHECK(doc["sequences"].size() == 2);
    CHECK(doc["sequences"][0]["gaps"][1]["gap"] == "2|1");
  }

  TEST_CASE("potential grid of the pair") {
    const NodeParams p(0.01);
    GridSpec grid;
    grid.points = 11;
    std::stringstream buf;
    write_potential_grid_csv(buf, p, Network::pair(0.0, 0.0), grid);
    const auto rows = lines(buf.str());
    REQUIRE(rows.size() == 1 + 11 * 11);
    CHECK(rows[0] == "x1,x2,V");

    // Symmetric under swapping the axes; at beta = 0 V(x1, x2) = V(x1) + V(x2).
    std::map<std::pair<std::string, std::string>, double> value;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      std::istringstream row(rows[k]);
      std::string a, b, v;
      std::getline(row, a, ',');
      std::getline(row, b, ',');
      std::getline(row, v, ',');
      value[{a, b}] = std::stod(v);
      CHECK(std::stod(v) == doctest::Approx(potential_1d(std::stod(a), p) + potential_1d(std::stod(b), p)));
    }
    for (const auto& [key, v] : value) CHECK(value.at({key.second, key.first}) == v);

    grid.points = 1;
    std::stringstream one;
    write_potential_grid_csv(one, p, Network::pair(0.1, 0.0), grid);
    CHECK(lines(one.str()).size() == 2);
    std::stringstream none;
    CHECK_THROWS_AS(write_potential_grid_csv(none, p, Network::chain(2, 0.1, 0.0), grid), Error);
    CHECK_THROWS_AS(write_potential_grid_csv(none, p, Network({{1, 2}, {0, 2}, {0, 1}}, 0.1, 0.0), grid),
                    Error);
  }

  TEST_CASE("boundary JSON for the pair includes the closed forms") {
    const NodeParams p(0.01);
    const json doc = json::parse(boundaries_json({0.0101, 0.09, std::nullopt}, p, Network::pair(0.0, 0.0)));
    CHECK(doc["beta3"].is_null());
    CHECK(doc["pair_formulas"]["fold_printed_root"].is_null());
    CHECK(doc["pair_formulas"]["pitchfork"].get<double>() == doctest::Approx(0.09));
    const json chain = json::parse(boundaries_json({0.01, 0.2, 0.3}, p, Network::chain(3, 0.0, 0.0)));
    CHECK_FALSE(chain.contains("pair_formulas"));
  }
}
