#include <doctest.h>

#include <cmath>
#include <numbers>

#include "domino/error.hpp"
#include "domino/kramers.hpp"
#include "domino/sde.hpp"
#include "domino/stats.hpp"

using namespace domino;

namespace {

template <class F>
void expect_error(ErrorKind kind, F&& f) {
  try {
    f();
    FAIL("expected " << std::string(to_string(kind)));
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

// Single-node Kramers time written out from the quartic potential.
double kramers_by_hand(double nu, double alpha) {
  auto V = [nu](double x) { return x * x * x * x / 4 - x * x * x / 3 + nu * (x - x * x / 2); };
  auto V2 = [nu](double x) { return 3 * x * x - 2 * x - nu; };
  const double q = -std::sqrt(nu), s = std::sqrt(nu);
  return 2 * std::numbers::pi / std::sqrt(V2(q) * -V2(s)) * std::exp(2 * (V(s) - V(q)) / (alpha * alpha));
}

KramersEstimate pair_leg(const NodeParams& p, double beta, double alpha, const std::string& well,
                         const std::string& gate) {
  const Network net = Network::pair(beta, alpha);
  return eyring_kramers(labelled_equilibrium(p, net, well), labelled_equilibrium(p, net, gate), p,
                        net, alpha);
}

}  // namespace

TEST_SUITE("kramers") {
  TEST_CASE("single-node escape time") {
    const NodeParams p(0.01);
    CHECK(kramers_1d(p, 0.03) == doctest::Approx(611.1259709771632).epsilon(1e-12));
    CHECK(kramers_1d(p, 0.03) == doctest::Approx(kramers_by_hand(0.01, 0.03)).epsilon(1e-12));
    CHECK(kramers_1d(p, 0.03) / std::exp(2.0 / 0.0009 * (4.0 / 3.0) * 1e-3) ==
          doctest::Approx(31.57419416998276).epsilon(1e-12));
    expect_error(ErrorKind::InvalidArgument, [&] { kramers_1d(p, 0.0); });
  }

  TEST_CASE("a lone node reduces Eyring-Kramers to the 1-D formula") {
    for (double nu : {0.01, 0.05, 0.2}) {
      const NodeParams p(nu);
      const Network net({{}}, 0.0, 0.04);
      const KramersEstimate est =
          eyring_kramers(classify(anchor_state("Q", p), p, net), classify(anchor_state("S", p), p, net),
                         p, net, 0.04);
      CHECK(est.T == doctest::Approx(kramers_1d(p, 0.04)).epsilon(1e-14));
    }
  }

  TEST_CASE("uncoupled pair leg equals the single-node time") {
    const NodeParams p(0.01);
    const KramersEstimate est = pair_leg(p, 0.0, 0.03, "QQ", "QS");
    CHECK(est.T == doctest::Approx(kramers_1d(p, 0.03)).epsilon(1e-12));
    CHECK(gate_adjusted(est, 2) == doctest::Approx(est.T / 2));
    expect_error(ErrorKind::InvalidArgument, [&] { gate_adjusted(est, 0); });
  }

  TEST_CASE("relabelling the nodes leaves the estimate unchanged") {
    const NodeParams p(0.01);
    const KramersEstimate a = pair_leg(p, 0.05, 0.03, "QQ", "QS");
    const KramersEstimate b = pair_leg(p, 0.05, 0.03, "QQ", "SQ");
    CHECK(a.T == doctest::Approx(b.T).epsilon(1e-12));
    CHECK(a.barrier == doctest::Approx(b.barrier).epsilon(1e-12));
  }

  TEST_CASE("log T is linear in 1/alpha^2 with slope equal to the barrier") {
    const NodeParams p(0.01);
    const KramersEstimate e1 = pair_leg(p, 0.05, 0.05, "QQ", "QS");
    const KramersEstimate e2 = pair_leg(p, 0.05, 0.03, "QQ", "QS");
    const double slope = (std::log(e2.T) - std::log(e1.T)) / (2.0 / 0.0009 - 2.0 / 0.0025);
    CHECK(slope == doctest::Approx(e1.barrier).epsilon(1e-9));
  }

  TEST_CASE("inputs that are not a well and a gate are rejected") {
    const NodeParams p(0.01);
    const Network net = Network::pair(0.05, 0.03);
    const Equilibrium qq = labelled_equilibrium(p, net, "QQ");
    const Equilibrium qs = labelled_equilibrium(p, net, "QS");
    const Equilibrium ss = labelled_equilibrium(p, net, "SS");
    expect_error(ErrorKind::NotAGate, [&] { eyring_kramers(qs, qq, p, net, 0.03); });
    expect_error(ErrorKind::NotAGate, [&] { eyring_kramers(qq, ss, p, net, 0.03); });
    expect_error(ErrorKind::NotAGate, [&] { eyring_kramers(qq, qq, p, net, 0.03); });
    expect_error(ErrorKind::AsymmetricNetwork, [&] {
      const Network chain = Network::chain(2, 0.05, 0.03);
      eyring_kramers(qq, qs, p, chain, 0.03);
    });
    expect_error(ErrorKind::MissingEquilibrium, [&] { labelled_equilibrium(p, net, "QA"); });
  }

  TEST_CASE("regime lookup and parsing") {
    const NodeParams p(0.01);
    CHECK(pair_regime(p, 0.0) == Regime::Weak);
    CHECK(pair_regime(p, 0.05) == Regime::Intermediate);
    CHECK(pair_regime(p, 0.2) == Regime::Strong);
    expect_error(ErrorKind::WrongRegime, [&] { pair_regime(p, beta2_pitchfork(p)); });
    CHECK(parse_regime("strong") == Regime::Strong);
    CHECK(std::string(to_string(Regime::Intermediate)) == "intermediate");
    expect_error(ErrorKind::InvalidArgument, [] { parse_regime("medium"); });
  }

  TEST_CASE("two-escape time per regime") {
    const NodeParams p(0.01);
    const double alpha = 0.03;
    const double single = kramers_1d(p, alpha);

    // Uncoupled: first of two escapes takes M/2, the second M.
    const RegimeEstimate weak = regime_T20(Regime::Weak, p, 0.0, alpha);
    CHECK(weak.T20 == doctest::Approx(1.5 * single).epsilon(1e-10));
    REQUIRE(weak.legs.size() == 2);
    CHECK(weak.legs[0].gate_count == 2);
    CHECK(weak.legs[1].gate_label == "SA");
    CHECK(weak.validity == "ok");

    const RegimeEstimate mid = regime_T20(Regime::Intermediate, p, 0.05, alpha);
    REQUIRE(mid.legs.size() == 1);
    CHECK(mid.T20 == doctest::Approx(mid.legs[0].T / 2));

    const RegimeEstimate strong = regime_T20(Regime::Strong, p, 0.2, alpha);
    REQUIRE(strong.legs.size() == 1);
    CHECK(strong.legs[0].barrier == doctest::Approx(2.0 * (4.0 / 3.0) * 1e-3).epsilon(1e-10));
    CHECK(strong.T20 == doctest::Approx(7046.03).epsilon(1e-5));

    expect_error(ErrorKind::WrongRegime, [&] { regime_T20(Regime::Strong, p, 0.05, alpha); });
    const RegimeEstimate edge = regime_T20(Regime::Intermediate, p, 0.0105, alpha);
    CHECK(edge.validity.find("beta1") != std::string::npos);
    CHECK(edge.legs[0].validity == edge.validity);
  }

  TEST_CASE("barrier over synchronized saddle is twice the single-node barrier") {
    const NodeParams p(0.01);
    for (double beta = 0.1; beta <= 1.0; beta += 0.1) {
      CHECK(pair_leg(p, beta, 0.03, "QQ", "SS").barrier ==
            doctest::Approx(2.0 * (4.0 / 3.0) * 1e-3).epsilon(1e-10));
    }
  }

  TEST_CASE("intermediate barrier grows with coupling toward the synchronized one") {
    const NodeParams p(0.01);
    double last = 0.0;
    for (double beta = 0.015; beta < 0.09; beta += 0.01) {
      const double barrier = pair_leg(p, beta, 0.03, "QQ", "QS").barrier;
      CHECK(barrier > last);
      CHECK(barrier < 2.0 * (4.0 / 3.0) * 1e-3);
      last = barrier;
    }
  }
}

TEST_SUITE("kramers_mc") {
  TEST_CASE("strong-coupling estimate against simulated escapes") {
    const NodeParams p(0.01);
    const double beta = 0.2, alpha = 0.03;
    const RegimeEstimate est = regime_T20(Regime::Strong, p, beta, alpha);

    SimulationConfig cfg;
    cfg.n_samples = 10000;
    cfg.master_seed = 77;
    cfg.t_max = 1.0e6;
    const Ensemble ens = monte_carlo(p, Network::pair(beta, alpha), cfg);
    REQUIRE(ens.n_censored == 0);
    std::vector<double> first, both;
    for (const auto& s : ens.samples) {
      first.push_back(s.record.tau_ordered.front());
      both.push_back(s.record.tau_ordered.back());
    }
    const double r1 = est.legs[0].T / moments(first).mean;
    const double r2 = est.T20 / moments(both).mean;
    MESSAGE("T / E[tau first] = " << r1 << ", T20 / E[tau both] = " << r2);
    CHECK(r1 >= 0.7);
    CHECK(r1 <= 1.4);
    CHECK(r2 >= 0.6);
    CHECK(r2 <= 1.6);
  }
}
