#ifndef ALLELO_LATTICE_HPP
#define ALLELO_LATTICE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "allelo/errors.hpp"
#include "allelo/rng.hpp"

namespace allelo {

// Site states of the two-species model: an inhibitory species (1) whose
// local density raises the death rate of a susceptible species (2).
enum SiteState : std::uint8_t {
  kEmpty = 0,
  kInhibitory = 1,
  kSusceptible = 2,
};

struct ModelParams {
  double beta1 = 2.0;  // birth rate of species 1
  double beta2 = 2.0;  // birth rate of species 2
  double gamma = 0.0;  // extra death rate of a 2 per unit local density of 1s
  double range = 1.0;  // dispersal range M (Euclidean)
  int dim = 1;         // lattice dimension d
  long side = 100;     // torus side length L

  // Throws ConfigError naming the violated precondition.
  void validate() const;
  long n_sites() const;
};

// Offsets y with 0 < ||y|| <= M, identical for every site of the torus.
struct NeighborhoodTemplate {
  int dim = 0;
  long size = 0;                        // N
  std::vector<std::vector<int>> offsets;  // each of length dim
};

NeighborhoodTemplate build_neighborhood(int dim, double range, long side);

// Row-major indexing of the torus (Z/L)^d; site = sum coord[k] * L^k.
struct TorusGeometry {
  int dim = 1;
  long side = 1;
  long n_sites = 1;

  TorusGeometry() = default;
  TorusGeometry(int d, long L);

  void coords_of(long site, int* out) const;
  long index_of(const int* coords) const;
  long wrap_neighbor(long site, const std::vector<int>& offset) const;
};

// Precomputed neighbor indices, n_sites x N, for the hot event loop.
struct NeighborTable {
  long n = 0;  // N
  std::vector<long> flat;
  long at(long site, long k) const { return flat[site * n + k]; }
};

NeighborTable build_neighbor_table(const TorusGeometry& geom,
                                   const NeighborhoodTemplate& tmpl);

// Dense configuration with per-species counts kept in sync.
struct SpatialConfig {
  int dim = 1;
  long side = 1;
  std::vector<std::uint8_t> states;
  std::array<long, 3> counts{0, 0, 0};

  SpatialConfig() = default;
  SpatialConfig(int d, long L)
      : dim(d), side(L), states(TorusGeometry(d, L).n_sites, kEmpty) {
    counts = {static_cast<long>(states.size()), 0, 0};
  }

  long n_sites() const { return static_cast<long>(states.size()); }
  std::uint8_t at(long site) const { return states[site]; }
  void set(long site, std::uint8_t s) {
    std::uint8_t old = states[site];
    if (old == s) return;
    --counts[old];
    ++counts[s];
    states[site] = s;
  }
  std::array<long, 3> recount() const;
};

// i.i.d. product measure: each site independently 1 w.p. p1, 2 w.p. p2.
SpatialConfig sample_initial(long side, int dim, double p1, double p2,
                             Rng& rng);

// Fraction of the N neighbors of site x in state `species` (0, 1 or 2).
double local_fraction(const SpatialConfig& config, long site, int species,
                      const NeighborhoodTemplate& tmpl);

// Transition rates out of site x: rate_to[s] is the rate of jumping to
// state s (zero for the current state and for unreachable targets).
struct SiteRates {
  std::array<double, 3> rate_to{0.0, 0.0, 0.0};
};

SiteRates site_rates(const SpatialConfig& config, long site,
                     const ModelParams& params,
                     const NeighborhoodTemplate& tmpl);

}  // namespace allelo

#endif
