#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("domino_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(DOMINO_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

const char* kSmallChain = R"({
  "model": {"nu": 0.01},
  "network": {"builder": "chain", "n_nodes": 3, "beta": 0.1, "alpha": 0.05},
  "simulation": {"master_seed": 3, "n_samples": 60},
  "analysis": {"histogram_bins": 8}
})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate is reproducible and independent of worker count") {
    TempDir tmp;
    const fs::path cfg = write_config(tmp.path, kSmallChain);
    const std::string base = "simulate --config " + cfg.string() + " --out ";
    REQUIRE(run(base + (tmp.path / "a").string() + " --threads 1") == 0);
    REQUIRE(run(base + (tmp.path / "b").string() + " --threads 1") == 0);
    REQUIRE(run(base + (tmp.path / "c").string() + " --threads 8") == 0);
    for (const char* file : {"ensemble.csv", "sequence_table.csv", "summary.json"}) {
      CAPTURE(file);
      const std::string a = slurp(tmp.path / "a" / file);
      CHECK_FALSE(a.empty());
      CHECK(a == slurp(tmp.path / "b" / file));
      CHECK(a == slurp(tmp.path / "c" / file));
    }
    REQUIRE(run(base + (tmp.path / "d").string() + " --seed 4") == 0);
    CHECK(slurp(tmp.path / "a" / "ensemble.csv") != slurp(tmp.path / "d" / "ensemble.csv"));

    // Re-deriving the summaries from the stored ensemble gives the same files.
    REQUIRE(run("stats --ensemble " + (tmp.path / "a" / "ensemble.csv").string() + " --config " +
                cfg.string() + " --out " + (tmp.path / "e").string()) == 0);
    CHECK(slurp(tmp.path / "e" / "sequence_table.csv") == slurp(tmp.path / "a" / "sequence_table.csv"));
    CHECK(slurp(tmp.path / "e" / "summary.json") == slurp(tmp.path / "a" / "summary.json"));
  }

  TEST_CASE("configuration errors exit with status 2") {
    TempDir tmp;
    CHECK(run("simulate --config " +
              write_config(tmp.path, R"({
      "model": {"nu": 0.01},
      "network": {"builder": "pair", "beta": 0.1, "alpha": 0.03},
      "simulation": {"n_samples": 0}
    })").string()) == 2);
    CHECK(run("simulate --config " + write_config(tmp.path, R"({"simulaton": {}})").string()) == 2);
    CHECK(run("simulate") == 2);
    CHECK(run("teleport") == 2);
    CHECK(run("stats --ensemble " + (tmp.path / "missing.csv").string()) == 2);
  }

  TEST_CASE("bifurcate writes branches and boundaries") {
    TempDir tmp;
    const fs::path cfg = write_config(tmp.path, R"({
      "model": {"nu": 0.01},
      "network": {"builder": "pair", "beta": 0.0, "alpha": 0.03},
      "analysis": {"beta_range": {"min": 0, "max": 0.2, "points": 201}}
    })");
    REQUIRE(run("bifurcate --config " + cfg.string() + " --out " + tmp.path.string()) == 0);
    const json b = json::parse(slurp(tmp.path / "boundaries.json"));
    CHECK(b["beta1"].get<double>() == doctest::Approx(0.0101).epsilon(0.1));
    CHECK(b["beta2"].get<double>() == doctest::Approx(0.09).epsilon(1e-4));
    CHECK(b["beta3"].is_null());
    const std::string branches = slurp(tmp.path / "branches.csv");
    CHECK(branches.rfind("branch,beta,x1,x2,kind,leading_eigenvalue,unstable_dimension,near_degenerate", 0) == 0);
  }

  TEST_CASE("kramers writes estimates and regimes") {
    TempDir tmp;
    const fs::path cfg = write_config(tmp.path, R"({
      "model": {"nu": 0.01},
      "network": {"builder": "pair", "beta": 0.2, "alpha": 0.03},
      "analysis": {"regimes": ["strong"], "estimates": [{"well": "QQ", "gate": "SS"}]}
    })");
    REQUIRE(run("kramers --config " + cfg.string() + " --out " + tmp.path.string()) == 0);
    const json doc = json::parse(slurp(tmp.path / "estimates.json"));
    CHECK(doc["kramers_1d"].get<double>() == doctest::Approx(611.1259709771632).epsilon(1e-12));
    CHECK(doc["regimes"][0]["T20"].get<double>() == doctest::Approx(7046.03).epsilon(1e-5));
    CHECK(doc["estimates"][0]["G"] == 1);

    const fs::path wrong = write_config(tmp.path, R"({
      "model": {"nu": 0.01},
      "network": {"builder": "pair", "beta": 0.05, "alpha": 0.03},
      "analysis": {"regimes": ["strong"]}
    })");
    CHECK(run("kramers --config " + wrong.string() + " --out " + tmp.path.string()) == 1);
  }

  TEST_CASE("potential grid needs a symmetric pair") {
    TempDir tmp;
    const fs::path pair = write_config(tmp.path, R"({
      "model": {"nu": 0.05},
      "network": {"builder": "pair", "beta": 0.1, "alpha": 0.03},
      "analysis": {"grid": {"points": 21}}
    })");
    REQUIRE(run("potential-grid --config " + pair.string() + " --out " + tmp.path.string()) == 0);
    std::istringstream eq(slurp(tmp.path / "equilibria.csv"));
    int rows = -1;
    for (std::string line; std::getline(eq, line);) ++rows;
    CHECK(rows == 5);

    const fs::path chain = write_config(tmp.path, R"({
      "model": {"nu": 0.05},
      "network": {"builder": "chain", "n_nodes": 2, "beta": 0.1, "alpha": 0.03}
    })");
    CHECK(run("potential-grid --config " + chain.string() + " --out " + tmp.path.string()) == 1);
  }
}
