#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "domino/error.hpp"
#include "domino/escape.hpp"

using namespace domino;

TEST_SUITE("escape") {
  TEST_CASE("crossing time interpolates inside the step") {
    // From 0.4 at t=10 to 0.6 at t=10.01: the midpoint crosses 0.5.
    const auto tc = crossing_time(0.4, 0.6, 10.0, 0.01, 0.5);
    REQUIRE(tc.has_value());
    CHECK(std::fabs(*tc - 10.005) <= kTimeQuantum);
    CHECK_FALSE(crossing_time(0.4, 0.5, 10.0, 0.01, 0.5).has_value());
    CHECK_FALSE(crossing_time(0.6, 0.45, 10.0, 0.01, 0.5).has_value());
    // A node already above the threshold is latched at the start of the step.
    CHECK(*crossing_time(0.7, 0.8, 3.0, 0.01, 0.5) == 3.0);
  }

  TEST_CASE("crossing times sit on the time quantum") {
    const auto tc = crossing_time(0.41234, 0.57891, 123.45, 0.01, 0.5);
    REQUIRE(tc);
    CHECK(*tc / kTimeQuantum == std::round(*tc / kTimeQuantum));
  }

  TEST_CASE("detector latches each node once") {
    EscapeDetector det(3, 0.5);
    std::vector<double> a{0.0, 0.0, 0.0}, b{0.0, 0.6, 0.0}, c{0.0, 0.3, 0.7};
    CHECK(det.observe(a, b, 0.0, 1.0) == 1);
    CHECK(det.observe(b, c, 1.0, 1.0) == 1);
    CHECK(det.observe(c, b, 2.0, 1.0) == 0);  // node 2 re-crossing is ignored
    CHECK(det.remaining() == 1);
    CHECK_FALSE(det.all_escaped());
    CHECK(det.times()[1].value() == doctest::Approx(5.0 / 6.0));
  }

  TEST_CASE("record ordering, gaps and labels") {
    std::vector<std::optional<double>> t{5.0, 3.0, 1.0};
    const EscapeRecord rec = build_record(t, 100.0);
    CHECK(rec.sequence == std::vector<int>{3, 2, 1});
    CHECK(rec.tau_ordered == std::vector<double>{1.0, 3.0, 5.0});
    CHECK(rec.gaps == std::vector<double>{1.0, 2.0, 2.0});
    CHECK_FALSE(rec.censored());
    CHECK(format_sequence(rec.sequence) == "(3, 2, 1)");
  }

  TEST_CASE("exact ties go to the lowest node index") {
    std::vector<std::optional<double>> t{2.0, 2.0, 1.0};
    CHECK(build_record(t, 10.0).sequence == std::vector<int>{3, 1, 2});
  }

  TEST_CASE("censored nodes report t_max and leave the sequence") {
    std::vector<std::optional<double>> t{std::nullopt, 4.0, std::nullopt};
    const EscapeRecord rec = build_record(t, 1000.0);
    CHECK(rec.censored());
    CHECK(rec.tau_node == std::vector<double>{1000.0, 4.0, 1000.0});
    CHECK(rec.escaped == std::vector<bool>{false, true, false});
    CHECK(rec.sequence == std::vector<int>{2});
    CHECK(rec.gaps == std::vector<double>{4.0});
  }

  TEST_CASE("sum of gaps equals the last escape time exactly") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 2.0e5);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int trial = 0; trial < 20000; ++trial) {
      std::vector<std::optional<double>> t(4);
      for (auto& v : t) {
        const double start = std::floor(u(gen) * 100.0) / 100.0;
        v = crossing_time(0.5 - frac(gen), 0.5 + frac(gen), start, 0.01, 0.5);
      }
      const EscapeRecord rec = build_record(t, 2.0e5);
      if (rec.censored()) continue;
      double sum = 0.0;
      for (double g : rec.gaps) sum += g;
      CHECK(sum == *std::max_element(rec.tau_node.begin(), rec.tau_node.end()));
    }
  }

  TEST_CASE("sequence labels round-trip") {
    CHECK(parse_sequence("(3, 2, 1)") == std::vector<int>{3, 2, 1});
    CHECK(parse_sequence("1-3-2") == std::vector<int>{1, 3, 2});
    CHECK(parse_sequence("()").empty());
    const std::vector<int> s{12, 1, 7};
    CHECK(parse_sequence(format_sequence(s)) == s);
    try {
      parse_sequence("(1; 2)");
      FAIL("expected InvalidArgument");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
  }
}
