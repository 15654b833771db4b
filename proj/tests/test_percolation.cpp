#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "allelo/percolation.hpp"
#include "allelo/rng.hpp"

using namespace allelo;

TEST_CASE("degenerate probabilities") {
  SUBCASE("p = 1: every parity site is wet when level zero starts wet") {
    PercSample s = percolate(1.0, 1, 20, 1, 0);
    for (int n = 0; n <= 20; ++n)
      CHECK(s.wet_density[n] == doctest::Approx(1.0));
    CHECK(s.origin_reached_top);
  }
  SUBCASE("p = 0: nothing is wet anywhere") {
    PercSample s = percolate(0.0, 1, 20, 1, 0);
    for (int n = 0; n <= 20; ++n) CHECK(s.wet_density[n] == 0.0);
    CHECK_FALSE(s.origin_reached_top);
  }
  SUBCASE("estimates are exact at the endpoints") {
    ThetaEstimate t1 = estimate_theta(1.0, 1, 50, 100, 7);
    CHECK(t1.theta_hat == 1.0);
    ThetaEstimate t0 = estimate_theta(0.0, 1, 50, 100, 7);
    CHECK(t0.theta_hat == 0.0);
  }
}

TEST_CASE("wet sites respect the oriented-lattice structure") {
  PercSample s = percolate(0.7, 1, 40, 31, 5);
  std::vector<int> m(1);
  for (int n = 0; n <= 40; ++n)
    for (int x = -40; x <= 40; ++x) {
      m[0] = x;
      if ((x + n) % 2 != 0) {
        CHECK_FALSE(s.is_wet(m, n));  // off-parity sites never wet
        continue;
      }
      if (!s.is_wet(m, n)) continue;
      CHECK(s.is_open(m, n, 31, 5));  // wet needs open
      if (n > 0) {
        std::vector<int> left{x - 1}, right{x + 1};
        CHECK((s.is_wet(left, n - 1) || s.is_wet(right, n - 1)));
      }
    }
}

TEST_CASE("origin cluster is inside the wet set when level zero is all wet") {
  PercSample s = percolate(0.75, 1, 60, 97, 3);
  for (int n = 0; n <= 60; ++n)
    for (std::size_t i = 0; i < s.wet[n].size(); ++i)
      if (s.origin_cluster[n][i]) CHECK(s.wet[n][i] == 1);
}

TEST_CASE("recomputation is idempotent") {
  PercSample a = percolate(0.65, 1, 50, 11, 4);
  PercSample b = percolate(0.65, 1, 50, 11, 4);
  for (int n = 0; n <= 50; ++n) CHECK(a.wet[n] == b.wet[n]);
}

TEST_CASE("shared uniforms couple the wet sets monotonically") {
  for (int rep = 0; rep < 100; ++rep) {
    std::uint64_t stream = make_stream(9, rep);
    PercSample lo = percolate(0.6, 1, 100, 23, stream);
    PercSample hi = percolate(0.8, 1, 100, 23, stream);
    for (int n = 0; n <= 100; ++n)
      for (std::size_t i = 0; i < lo.wet[n].size(); ++i)
        if (lo.wet[n][i]) REQUIRE(hi.wet[n][i] == 1);
  }
}

TEST_CASE("the survival walk agrees with the full sample") {
  // estimate_theta's rolling two-level walk and the stored-grid origin
  // cluster see the same uniforms, so their survival verdicts must match
  const int reps = 40;
  int survived_full = 0;
  for (int rep = 0; rep < reps; ++rep) {
    PercSample s = percolate(0.72, 1, 60, 11, make_stream(0, rep), false);
    if (s.origin_reached_top) ++survived_full;
  }
  ThetaEstimate est = estimate_theta(0.72, 1, 60, reps, 11, 0);
  CHECK(est.survived == survived_full);
}

TEST_CASE("survival estimates increase with p on shared seeds") {
  ThetaEstimate lo = estimate_theta(0.6, 1, 200, 500, 41);
  ThetaEstimate hi = estimate_theta(0.8, 1, 200, 500, 41);
  CHECK(lo.theta_hat < hi.theta_hat);
  CHECK(hi.ci_lo >= 0.0);
  CHECK(hi.ci_hi <= 1.0);
  CHECK(lo.ci_lo <= lo.theta_hat);
  CHECK(lo.theta_hat <= lo.ci_hi);
}

TEST_CASE("deep supercritical percolation survives to level 200") {
  // p = 0.9 is far above the oriented-site threshold; starting from a fully
  // wet level the wet density should stay positive in nearly every run
  int positive = 0;
  for (int rep = 0; rep < 100; ++rep) {
    PercSample s = percolate(0.9, 1, 200, 13, make_stream(3, rep));
    if (s.wet_density[200] > 0.0) ++positive;
  }
  CHECK(positive >= 95);
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(percolate(1.5, 1, 10, 1, 0), ConfigError);
  CHECK_THROWS_AS(percolate(0.5, 0, 10, 1, 0), ConfigError);
  CHECK_THROWS_AS(estimate_theta(0.5, 1, 10, 0, 1), ConfigError);
  CHECK_THROWS_AS(percolate(0.5, 4, 400, 1, 0), ResourceCapError);
}

TEST_CASE("theta csv format") {
  std::vector<ThetaEstimate> rows = {estimate_theta(0.7, 1, 30, 50, 2)};
  std::stringstream ss;
  write_theta_csv(ss, rows);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "p,reps,n_max,theta_hat,ci_lo,ci_hi");
  int count = 0;
  while (std::getline(ss, line)) ++count;
  CHECK(count == 1);
}
