#ifndef ALLELO_RNG_HPP
#define ALLELO_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace allelo {

// Philox4x64-10 counter-based generator (Salmon et al., Random123 family).
//
// The 128-bit key is (seed, stream): every (seed, stream) pair indexes an
// independent random sequence, so parallel replicates simply use distinct
// stream ids derived from the replicate index.  The raw u64 sequence for a
// given key is identical to numpy's Philox bit generator constructed with
// key=[seed, stream] and counter=[0,0,0,0], which serves as the external
// known-answer oracle in the test suite.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_{seed, stream}, block_(0), pos_(4) {}

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream() const { return key_[1]; }

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      ++block_;  // pre-increment: first block uses counter (block=1,0,0,0)
      fill(block_);
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  // uniform in [0,1) with 53 random bits
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // exponential with the given rate; strictly positive
  double exponential(double rate) {
    double x;
    do {
      x = -std::log(1.0 - uniform01()) / rate;
    } while (x <= 0.0);
    return x;
  }

  // unbiased integer in [0, n), n >= 1 (Lemire's multiply-shift with rejection)
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // index in [0, k) with probability weights[i] / sum(weights)
  template <typename Weights>
  int pick_weighted(const Weights& weights, int k, double total) {
    double u = uniform01() * total;
    double acc = 0.0;
    for (int i = 0; i + 1 < k; ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return k - 1;
  }

  // One raw Philox4x64-10 block for (key, counter); also usable as a
  // stateless hash for random-access uniforms (e.g. percolation site flags).
  static std::array<std::uint64_t, 4> philox_block(std::uint64_t k0,
                                                   std::uint64_t k1,
                                                   std::uint64_t c0,
                                                   std::uint64_t c1 = 0,
                                                   std::uint64_t c2 = 0,
                                                   std::uint64_t c3 = 0) {
    for (int r = 0; r < 10; ++r) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2E7470EE14C6C93ULL, c0, hi0, lo0);
      mulhilo(0xCA5A826395121157ULL, c2, hi1, lo1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
      k0 += 0x9E3779B97F4A7C15ULL;
      k1 += 0xBB67AE8584CAA73BULL;
    }
    return {c0, c1, c2, c3};
  }

  static double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

 private:
  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    __uint128_t p = static_cast<__uint128_t>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  void fill(std::uint64_t block) {
    buf_ = philox_block(key_[0], key_[1], block);
  }

  std::array<std::uint64_t, 2> key_;
  std::uint64_t block_;
  std::array<std::uint64_t, 4> buf_{};
  int pos_;
};

// Stream-id layout used throughout the toolkit: a run is identified by a
// 32-bit experiment slot and a 32-bit replicate index, so streams of
// different sweep cells / replicates never collide.
inline std::uint64_t make_stream(std::uint32_t slot, std::uint32_t replicate) {
  return (static_cast<std::uint64_t>(slot) << 32) |
         static_cast<std::uint64_t>(replicate);
}

}  // namespace allelo

#endif
