#ifndef ALLELO_PERCOLATION_HPP
#define ALLELO_PERCOLATION_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "allelo/errors.hpp"

namespace allelo {

// Oriented site percolation on the parity lattice: sites (m, n) with
// m_1 + ... + m_d + n even, arrows (m, n) -> (m', n+1) with |m - m'|_1 = 1.
// Open flags are i.i.d. Bernoulli(p), realized as site-keyed uniforms so
// that different p values share the same uniforms (exact monotone
// coupling).  Finite width with closed boundary beyond |m_i| <= width; the
// default width n_max + 1 is unreachable, giving the exact finite-level
// law.

struct PercSample {
  int d = 1;
  int n_max = 0;
  long width = 0;
  double p = 0.0;
  bool all_wet_level0 = true;
  // per level, flattened dense grid over [-width, width]^d
  std::vector<std::vector<std::uint8_t>> wet;
  std::vector<std::vector<std::uint8_t>> origin_cluster;
  std::vector<double> wet_density;  // per level, over parity-valid sites
  bool origin_reached_top = false;

  long grid_index(const std::vector<int>& m) const;
  bool is_wet(const std::vector<int>& m, int n) const;
  bool is_open(const std::vector<int>& m, int n, std::uint64_t seed,
               std::uint64_t stream) const;
};

PercSample percolate(double p, int d, int n_max, long width,
                     std::uint64_t seed, std::uint64_t stream,
                     bool all_wet_level0 = true);

// Convenience: width = n_max + 1.
PercSample percolate(double p, int d, int n_max, std::uint64_t seed,
                     std::uint64_t stream, bool all_wet_level0 = true);

struct ThetaEstimate {
  double p = 0.0;
  int d = 1;
  int n_max = 0;
  int reps = 0;
  int survived = 0;
  double theta_hat = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // Wilson 95%
};

// Fraction of replicates whose origin cluster reaches level n_max.
// Replicate r uses stream make_stream(slot, r), so estimates at different p
// on the same seed are monotone-coupled.
ThetaEstimate estimate_theta(double p, int d, int n_max, int reps,
                             std::uint64_t seed, std::uint32_t slot = 0);

// CSV: p,reps,n_max,theta_hat,ci_lo,ci_hi
void write_theta_csv(std::ostream& os, const std::vector<ThetaEstimate>& rows);

}  // namespace allelo

#endif
