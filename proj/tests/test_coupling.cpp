#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "allelo/coupling.hpp"

using namespace allelo;

namespace {

const PairState kS[6] = {{0, 0}, {0, 1}, {1, 1}, {2, 0}, {2, 1}, {2, 2}};

ModelParams base_params() {
  ModelParams p;
  p.beta1 = 2.0;
  p.beta2 = 3.0;
  p.gamma = 1.0;
  p.dim = 1;
  p.side = 30;
  return p;
}

SpatialConfig seeded_initial(long side, int seed, double p1 = 0.3,
                             double p2 = 0.3) {
  Rng rng(seed, 900);
  return sample_initial(side, 1, p1, p2, rng);
}

}  // namespace

TEST_CASE("closed-set membership is the pair of orderings") {
  int members = 0;
  for (int a = 0; a < 3; ++a)
    for (int g = 0; g < 3; ++g) {
      PairState s{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(g)};
      bool expect = !(a == 1 && g != 1) && !(g == 2 && a != 2);
      CHECK(pair_in_closed_set(s) == expect);
      if (expect) ++members;
    }
  CHECK(members == 6);
}

TEST_CASE("tabulated transitions from the coupled construction") {
  // label 0 on (1,1) -> (2,0): the 2 dies, the tree births
  CHECK(gbt_transition({1, 1}, {2, 0}, 0) == PairState{0, 1});
  // label 1 on (1,1) -> (2,0): only the tree coordinate gains
  CHECK(gbt_transition({1, 1}, {2, 0}, 1) == PairState{2, 1});
  // label 2 on (2,1) -> (0,0): the bush coordinate lags the 2
  CHECK(gbt_transition({2, 1}, {0, 0}, 2) == PairState{2, 0});
  // crosses reset to (0,0)
  for (PairState tail : kS)
    for (PairState head : kS)
      CHECK(gbt_transition(tail, head, kCrossLabel) == PairState{0, 0});
}

TEST_CASE("transition rejects pairs outside the closed set") {
  CHECK_THROWS_AS(gbt_transition({1, 0}, {0, 0}, 0), ConfigError);
  CHECK_THROWS_AS(gbt_transition({0, 0}, {0, 2}, 1), ConfigError);
  CHECK_THROWS_AS(gbt_transition({0, 0}, {0, 0}, 7), ConfigError);
}

TEST_CASE("the closed set is closed under every transition") {
  for (PairState tail : kS)
    for (PairState head : kS)
      for (int label : {0, 1, 2, kCrossLabel})
        CHECK(pair_in_closed_set(gbt_transition(tail, head, label)));
}

TEST_CASE("data table and rule derivation agree on all inputs") {
  CHECK(gbt_table_mismatches() == 0);
}

TEST_CASE("first coordinate reproduces the allelopathic event rules") {
  // under the split representation label 0 acts as birth-or-kill and
  // label 1 as plain birth; both depend only on the first coordinates
  for (PairState tail : kS)
    for (PairState head : kS) {
      int a_tail = tail.a, a_head = head.a;
      // label 0: kill arrow carrying the gamma share of beta1 births
      int expect0 = a_head;
      if (a_tail == 1 && a_head == 0) expect0 = 1;
      if (a_tail == 1 && a_head == 2) expect0 = 0;
      CHECK(gbt_transition(tail, head, 0).a == expect0);
      // label 1: pure birth arrow
      int expect1 = a_head;
      if (a_tail == 1 && a_head == 0) expect1 = 1;
      CHECK(gbt_transition(tail, head, 1).a == expect1);
      // label 2: birth of a 2
      int expect2 = a_head;
      if (a_tail == 2 && a_head == 0) expect2 = 2;
      CHECK(gbt_transition(tail, head, 2).a == expect2);
    }
}

TEST_CASE("second coordinate reproduces the successional rules") {
  // tree (1) births onto grass (0) and bush (2) through labels 0 and 1;
  // bush births onto grass through label 2
  for (PairState tail : kS)
    for (PairState head : kS) {
      for (int label : {0, 1}) {
        int expect = head.g;
        if (tail.g == 1 && head.g != 1) expect = 1;
        CHECK(gbt_transition(tail, head, label).g == expect);
      }
      int expect2 = head.g;
      if (tail.g == 2 && head.g == 0) expect2 = 2;
      CHECK(gbt_transition(tail, head, 2).g == expect2);
    }
}

TEST_CASE("equal parameters give identical coupled processes") {
  ModelParams p = base_params();
  SpatialConfig initial = seeded_initial(30, 1);
  SampleSpec samples = uniform_samples(10.0, 10);
  CouplingReport g =
      couple_gamma(initial, p, 1.5, 1.5, 10.0, 4, 0, samples);
  CHECK(g.violations == 0);
  for (const CouplingSample& cs : g.samples) CHECK(cs.counts[0] == cs.counts[1]);
  CouplingReport b =
      couple_birthrate(initial, p, 2.5, 2.5, 10.0, 4, 1, samples);
  CHECK(b.violations == 0);
  for (const CouplingSample& cs : b.samples) CHECK(cs.counts[0] == cs.counts[1]);
}

TEST_CASE("gamma coupling orders the processes sitewise") {
  ModelParams p = base_params();
  SampleSpec samples = uniform_samples(10.0, 10);
  for (int seed = 0; seed < 20; ++seed) {
    SpatialConfig initial = seeded_initial(30, seed);
    CouplingReport rep = couple_gamma(initial, p, 0.5, 2.0, 10.0,
                                      100 + seed, 0, samples);
    CHECK(rep.violations == 0);
    // 2s can only be lost when gamma grows
    for (const CouplingSample& cs : rep.samples)
      CHECK(cs.counts[1][kSusceptible] <= cs.counts[0][kSusceptible]);
  }
}

TEST_CASE("a large gamma surrogate still dominates exactly") {
  ModelParams p = base_params();
  SampleSpec samples = uniform_samples(8.0, 8);
  SpatialConfig initial = seeded_initial(30, 33);
  CouplingReport rep =
      couple_gamma(initial, p, 1.0, 64.0, 8.0, 9, 0, samples);
  CHECK(rep.violations == 0);
  for (const CouplingSample& cs : rep.samples)
    CHECK(cs.counts[1][kSusceptible] <= cs.counts[0][kSusceptible]);
}

TEST_CASE("birth-rate coupling orders the processes sitewise") {
  ModelParams p = base_params();
  SampleSpec samples = uniform_samples(10.0, 10);
  for (int seed = 0; seed < 20; ++seed) {
    SpatialConfig initial = seeded_initial(30, seed);
    CouplingReport rep = couple_birthrate(initial, p, 2.0, 3.0, 10.0,
                                          200 + seed, 0, samples);
    CHECK(rep.violations == 0);
    for (const CouplingSample& cs : rep.samples) {
      CHECK(cs.counts[0][kSusceptible] <= cs.counts[1][kSusceptible]);
      CHECK(cs.counts[1][kInhibitory] <= cs.counts[0][kInhibitory]);
    }
  }
}

TEST_CASE("ladders must be sorted and nonempty") {
  ModelParams p = base_params();
  SpatialConfig initial = seeded_initial(30, 5);
  SampleSpec samples;
  CHECK_THROWS_AS(couple_gamma(initial, p, 2.0, 1.0, 5.0, 1, 0, samples),
                  ConfigError);
  CHECK_THROWS_AS(
      couple_gamma_ladder(initial, p, {}, 5.0, 1, 0, samples), ConfigError);
  CHECK_THROWS_AS(
      couple_birthrate_ladder(initial, p, {3.0, 2.0}, 5.0, 1, 0, samples),
      ConfigError);
}

TEST_CASE("three-rung ladders keep every adjacent pair ordered") {
  ModelParams p = base_params();
  SampleSpec samples = uniform_samples(8.0, 8);
  for (int seed = 0; seed < 10; ++seed) {
    SpatialConfig initial = seeded_initial(30, seed);
    CouplingReport rep = couple_birthrate_ladder(
        initial, p, {1.0, 2.0, 4.0}, 8.0, 300 + seed, 0, samples);
    CHECK(rep.violations == 0);
    CHECK(rep.outcomes.size() == 3);
  }
}

TEST_CASE("gbt coupling stays in the closed set and dominates the 2s") {
  ModelParams p = base_params();  // gamma because 1 <= beta1
  SampleSpec samples = uniform_samples(10.0, 10);
  for (int seed = 0; seed < 20; ++seed) {
    SpatialConfig initial = seeded_initial(50, seed);
    ModelParams q = p;
    q.side = 50;
    CouplingReport rep =
        couple_gbt(initial, q, 10.0, 400 + seed, 0, samples);
    CHECK(rep.violations == 0);
    for (const CouplingSample& cs : rep.samples)
      CHECK(cs.counts[1][kSusceptible] <= cs.counts[0][kSusceptible]);
  }
}

TEST_CASE("gbt coupling rejects gamma above beta1") {
  ModelParams p = base_params();
  p.gamma = 3.0;  // beta1 = 2
  SpatialConfig initial = seeded_initial(30, 2);
  SampleSpec samples;
  CHECK_THROWS_AS(couple_gbt(initial, p, 5.0, 1, 0, samples), ConfigError);
}

TEST_CASE("gbt coupling from an empty lattice stays empty") {
  ModelParams p = base_params();
  SpatialConfig empty(1, 30);
  SampleSpec samples = uniform_samples(5.0, 5);
  CouplingReport rep = couple_gbt(empty, p, 5.0, 8, 0, samples);
  CHECK(rep.violations == 0);
  for (const CouplingSample& cs : rep.samples) {
    CHECK(cs.counts[0][kEmpty] == 30);
    CHECK(cs.counts[1][kEmpty] == 30);
  }
  CHECK(rep.outcomes[0] == Outcome::kBothExtinct);
}

TEST_CASE("coupling csv lists per-process counts") {
  ModelParams p = base_params();
  SpatialConfig initial = seeded_initial(30, 3);
  SampleSpec samples = uniform_samples(4.0, 4);
  CouplingReport rep = couple_gamma(initial, p, 0.5, 1.5, 4.0, 5, 0, samples);
  std::stringstream ss;
  write_coupling_csv(ss, rep);
  std::string header;
  std::getline(ss, header);
  CHECK(header ==
        "t,count0_p0,count1_p0,count2_p0,count0_p1,count1_p1,count2_p1,"
        "violations");
  int rows = 0;
  std::string line;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 4);
}
