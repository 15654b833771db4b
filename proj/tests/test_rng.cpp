#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "allelo/rng.hpp"

using namespace allelo;

// Known-answer vectors generated with numpy's Philox bit generator
// (philox4x64-10), counter=[0,0,0,0], key=[seed, stream]:
//   np.random.Philox(counter=[0,0,0,0], key=[k0,k1]).random_raw(8)
TEST_CASE("philox matches the external reference sequence") {
  struct Kat {
    std::uint64_t seed, stream;
    std::uint64_t expect[8];
  };
  const Kat kats[] = {
      {0x0, 0x0,
       {0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL,
        0x907d7a052fd5b4dcULL, 0x809bf322883987c3ULL, 0x471128b9e807f7ddULL,
        0xf250ba0dbec065b7ULL, 0xfc6ed66767a457bcULL}},
      {0x243F6A8885A308D3ULL, 0x13198A2E03707344ULL,
       {0xd96148ed4eef3177ULL, 0x3756c9977974e2e4ULL, 0xaca97084472822a9ULL,
        0xf84393111bc816fcULL, 0xafeacafa58106bc2ULL, 0x8ceec2cd5d66be03ULL,
        0xf35d32a580766947ULL, 0x71552ce89be91f93ULL}},
      {2024, 7,
       {0x432ce6839778571aULL, 0x054cd1d1e7e44c27ULL, 0x00b0dc5cec755323ULL,
        0x6a3f244106e3335eULL, 0x7b812bcf256af553ULL, 0x4699e94a3ee9f7ebULL,
        0x566bb25b4e8db017ULL, 0xf923beb3061eafa3ULL}},
  };
  for (const Kat& kat : kats) {
    Rng rng(kat.seed, kat.stream);
    for (int i = 0; i < 8; ++i) CHECK(rng.next_u64() == kat.expect[i]);
  }
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  bool same_ab = true, same_ac = true, same_ad = true;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t x = a.next_u64();
    same_ab = same_ab && x == b.next_u64();
    same_ac = same_ac && x == c.next_u64();
    same_ad = same_ad && x == d.next_u64();
  }
  CHECK(same_ab);
  CHECK_FALSE(same_ac);
  CHECK_FALSE(same_ad);
}

TEST_CASE("uniform01 range and mean") {
  Rng rng(1, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // mean of n uniforms: sd = 1/sqrt(12 n); allow 5 sigma
  CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("exponential is positive with the right mean") {
  Rng rng(2, 0);
  double sum = 0.0;
  const int n = 100000;
  const double rate = 3.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.exponential(rate);
    REQUIRE(x > 0.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - 1.0 / rate) < 5.0 / (rate * std::sqrt(n)));
}

TEST_CASE("below stays in range and covers small supports") {
  Rng rng(3, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t v = rng.below(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("make_stream is injective over slot/replicate pairs") {
  std::set<std::uint64_t> ids;
  for (std::uint32_t slot = 0; slot < 50; ++slot)
    for (std::uint32_t rep = 0; rep < 50; ++rep)
      ids.insert(make_stream(slot, rep));
  CHECK(ids.size() == 2500);
}
