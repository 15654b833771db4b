#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "allelo/lattice.hpp"

using namespace allelo;

namespace {

// independent enumeration oracle: all integer vectors with 0 < |y| <= M
std::set<std::vector<int>> enumerate_offsets(int d, double range) {
  std::set<std::vector<int>> out;
  int reach = static_cast<int>(std::ceil(range));
  std::vector<int> v(d, -reach);
  for (;;) {
    double n2 = 0;
    for (int k = 0; k < d; ++k) n2 += static_cast<double>(v[k]) * v[k];
    if (n2 > 0 && std::sqrt(n2) <= range + 1e-12) out.insert(v);
    int k = 0;
    for (; k < d; ++k) {
      if (v[k] < reach) {
        ++v[k];
        break;
      }
      v[k] = -reach;
    }
    if (k == d) break;
  }
  return out;
}

}  // namespace

TEST_CASE("neighborhood templates match the enumeration oracle") {
  SUBCASE("d=1 M=1 is the two unit steps") {
    NeighborhoodTemplate t = build_neighborhood(1, 1.0, 10);
    CHECK(t.size == 2);
    std::set<std::vector<int>> got(t.offsets.begin(), t.offsets.end());
    CHECK(got == std::set<std::vector<int>>{{-1}, {1}});
  }
  SUBCASE("d=2 M=1 gives the four axis neighbors") {
    NeighborhoodTemplate t = build_neighborhood(2, 1.0, 10);
    CHECK(t.size == 4);
    std::set<std::vector<int>> got(t.offsets.begin(), t.offsets.end());
    CHECK(got == enumerate_offsets(2, 1.0));
  }
  SUBCASE("d=2 M=1.5 adds the diagonals") {
    NeighborhoodTemplate t = build_neighborhood(2, 1.5, 10);
    CHECK(t.size == 8);
    std::set<std::vector<int>> got(t.offsets.begin(), t.offsets.end());
    CHECK(got == enumerate_offsets(2, 1.5));
  }
  SUBCASE("several ranges agree with the oracle") {
    for (double m : {1.0, 2.0, 2.5, 3.0})
      for (int d : {1, 2, 3}) {
        NeighborhoodTemplate t = build_neighborhood(d, m, 20);
        std::set<std::vector<int>> got(t.offsets.begin(), t.offsets.end());
        CHECK(got == enumerate_offsets(d, m));
      }
  }
}

TEST_CASE("self-wrapping neighborhoods are rejected") {
  CHECK_THROWS_AS(build_neighborhood(1, 1.0, 2), ConfigError);
  CHECK_THROWS_AS(build_neighborhood(2, 2.0, 4), ConfigError);
  CHECK_NOTHROW(build_neighborhood(1, 1.0, 3));
  CHECK_THROWS_AS(build_neighborhood(1, 0.0, 10), ConfigError);
}

TEST_CASE("offsets close under negation") {
  for (double m : {1.0, 1.5, 2.3}) {
    NeighborhoodTemplate t = build_neighborhood(2, m, 16);
    long positive_leads = 0;
    for (const auto& off : t.offsets) {
      std::vector<int> neg(off.size());
      for (std::size_t k = 0; k < off.size(); ++k) neg[k] = -off[k];
      CHECK(std::find(t.offsets.begin(), t.offsets.end(), neg) !=
            t.offsets.end());
      for (int v : off) {
        if (v > 0) ++positive_leads;
        if (v != 0) break;
      }
    }
    CHECK(t.size == 2 * positive_leads);
  }
}

TEST_CASE("local fractions count neighbors") {
  NeighborhoodTemplate t = build_neighborhood(1, 1.0, 6);

  SUBCASE("empty lattice gives zero occupied fractions") {
    SpatialConfig c(1, 6);
    CHECK(local_fraction(c, 0, kInhibitory, t) == 0.0);
    CHECK(local_fraction(c, 0, kSusceptible, t) == 0.0);
    CHECK(local_fraction(c, 0, kEmpty, t) == 1.0);
  }
  SUBCASE("all neighbors in a state give fraction one") {
    SpatialConfig c(1, 6);
    for (long s = 0; s < 6; ++s) c.set(s, kInhibitory);
    CHECK(local_fraction(c, 3, kInhibitory, t) == 1.0);
  }
  SUBCASE("mixed neighbors of a 1d site") {
    SpatialConfig c(1, 6);
    c.set(1, kInhibitory);
    c.set(3, kSusceptible);
    CHECK(local_fraction(c, 2, kInhibitory, t) == 0.5);
    CHECK(local_fraction(c, 2, kSusceptible, t) == 0.5);
    CHECK(local_fraction(c, 2, kEmpty, t) == 0.0);
  }
  SUBCASE("fractions over the three states sum to one") {
    Rng rng(5, 0);
    SpatialConfig c = sample_initial(6, 1, 0.3, 0.3, rng);
    for (long x = 0; x < 6; ++x) {
      double sum = local_fraction(c, x, 0, t) + local_fraction(c, x, 1, t) +
                   local_fraction(c, x, 2, t);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("wraps around the torus") {
    SpatialConfig c(1, 6);
    c.set(5, kInhibitory);
    CHECK(local_fraction(c, 0, kInhibitory, t) == 0.5);
  }
}

TEST_CASE("site rates implement the local transition table") {
  ModelParams p;
  p.beta1 = 2.0;
  p.beta2 = 3.0;
  p.gamma = 4.0;
  p.dim = 1;
  p.side = 6;
  NeighborhoodTemplate t = build_neighborhood(1, 1.0, 6);

  SUBCASE("an occupied 1 dies at rate exactly one") {
    SpatialConfig c(1, 6);
    c.set(2, kInhibitory);
    SiteRates r = site_rates(c, 2, p, t);
    CHECK(r.rate_to[kEmpty] == 1.0);
    CHECK(r.rate_to[kInhibitory] == 0.0);
    CHECK(r.rate_to[kSusceptible] == 0.0);
  }
  SUBCASE("a 2 with half its neighbors inhibitory dies at 1 + gamma/2") {
    SpatialConfig c(1, 6);
    c.set(2, kSusceptible);
    c.set(1, kInhibitory);
    SiteRates r = site_rates(c, 2, p, t);
    CHECK(r.rate_to[kEmpty] == doctest::Approx(3.0));
  }
  SUBCASE("an isolated empty site has zero birth rates") {
    SpatialConfig c(1, 6);
    SiteRates r = site_rates(c, 0, p, t);
    CHECK(r.rate_to[kInhibitory] == 0.0);
    CHECK(r.rate_to[kSusceptible] == 0.0);
  }
  SUBCASE("empty site births scale with neighbor fractions") {
    SpatialConfig c(1, 6);
    c.set(1, kInhibitory);
    c.set(3, kSusceptible);
    SiteRates r = site_rates(c, 2, p, t);
    CHECK(r.rate_to[kInhibitory] == doctest::Approx(p.beta1 * 0.5));
    CHECK(r.rate_to[kSusceptible] == doctest::Approx(p.beta2 * 0.5));
  }
  SUBCASE("gamma = 0 reduces to the multitype contact process") {
    ModelParams q = p;
    q.gamma = 0.0;
    SpatialConfig c(1, 6);
    c.set(2, kSusceptible);
    c.set(1, kInhibitory);
    c.set(3, kInhibitory);
    SiteRates r = site_rates(c, 2, q, t);
    CHECK(r.rate_to[kEmpty] == 1.0);  // density independent
  }
  SUBCASE("rates are translation invariant") {
    Rng rng(9, 0);
    SpatialConfig c = sample_initial(6, 1, 0.4, 0.3, rng);
    TorusGeometry geom(1, 6);
    for (long shift = 1; shift < 6; ++shift) {
      SpatialConfig shifted(1, 6);
      for (long x = 0; x < 6; ++x) shifted.set((x + shift) % 6, c.at(x));
      for (long x = 0; x < 6; ++x) {
        SiteRates a = site_rates(c, x, p, t);
        SiteRates b = site_rates(shifted, (x + shift) % 6, p, t);
        for (int s = 0; s < 3; ++s) CHECK(a.rate_to[s] == b.rate_to[s]);
      }
    }
  }
}

TEST_CASE("spatial configs keep counts in sync") {
  Rng rng(11, 0);
  SpatialConfig c = sample_initial(25, 2, 0.3, 0.2, rng);
  CHECK(c.counts == c.recount());
  c.set(0, kInhibitory);
  c.set(1, kSusceptible);
  c.set(0, kEmpty);
  CHECK(c.counts == c.recount());
  long total = c.counts[0] + c.counts[1] + c.counts[2];
  CHECK(total == 625);
}

TEST_CASE("initial sampling hits the product-measure moments") {
  SUBCASE("degenerate densities") {
    Rng rng(1, 0);
    SpatialConfig all1 = sample_initial(10, 1, 1.0, 0.0, rng);
    CHECK(all1.counts[kInhibitory] == 10);
    SpatialConfig empty = sample_initial(10, 1, 0.0, 0.0, rng);
    CHECK(empty.counts[kEmpty] == 10);
  }
  SUBCASE("binomial counts within 4 sigma") {
    Rng rng(123, 5);
    SpatialConfig c = sample_initial(100, 2, 0.25, 0.25, rng);
    double mean = 2500, sd = std::sqrt(10000 * 0.25 * 0.75);
    CHECK(std::abs(c.counts[kInhibitory] - mean) < 4 * sd);
    CHECK(std::abs(c.counts[kSusceptible] - mean) < 4 * sd);
  }
  SUBCASE("invalid densities are rejected") {
    Rng rng(1, 0);
    CHECK_THROWS_AS(sample_initial(10, 1, 0.7, 0.7, rng), ConfigError);
    CHECK_THROWS_AS(sample_initial(10, 1, -0.1, 0.2, rng), ConfigError);
  }
}

TEST_CASE("model params validation names the violated precondition") {
  ModelParams p;
  p.side = 2;  // too small for M = 1
  try {
    p.validate();
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2*ceil(M)") != std::string::npos);
  }
}
