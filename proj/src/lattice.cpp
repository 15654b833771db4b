#include "allelo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace allelo {

void ModelParams::validate() const {
  if (!(beta1 >= 0.0)) throw ConfigError("beta1 must be >= 0");
  if (!(beta2 >= 0.0)) throw ConfigError("beta2 must be >= 0");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (!(range > 0.0)) throw ConfigError("range M must be > 0");
  if (dim < 1) throw ConfigError("dimension d must be >= 1");
  long need = 2 * static_cast<long>(std::ceil(range));
  if (side <= need)
    throw ConfigError("side L must exceed 2*ceil(M) = " + std::to_string(need) +
                      " so neighborhoods never self-wrap");
}

long ModelParams::n_sites() const {
  long n = 1;
  for (int k = 0; k < dim; ++k) n *= side;
  return n;
}

NeighborhoodTemplate build_neighborhood(int dim, double range, long side) {
  if (dim < 1) throw ConfigError("dimension d must be >= 1");
  if (!(range > 0.0)) throw ConfigError("range M must be > 0");
  long reach = static_cast<long>(std::ceil(range));
  if (side <= 2 * reach)
    throw ConfigError("side L must exceed 2*ceil(M) so neighborhoods never "
                      "self-wrap");

  NeighborhoodTemplate tmpl;
  tmpl.dim = dim;
  const double r2 = range * range;
  std::vector<int> v(dim, -static_cast<int>(reach));
  for (;;) {
    double norm2 = 0.0;
    for (int k = 0; k < dim; ++k) norm2 += double(v[k]) * v[k];
    if (norm2 > 0.0 && norm2 <= r2) tmpl.offsets.push_back(v);
    int k = 0;
    for (; k < dim; ++k) {
      if (v[k] < reach) {
        ++v[k];
        break;
      }
      v[k] = -static_cast<int>(reach);
    }
    if (k == dim) break;
  }
  std::sort(tmpl.offsets.begin(), tmpl.offsets.end());
  tmpl.size = static_cast<long>(tmpl.offsets.size());
  return tmpl;
}

TorusGeometry::TorusGeometry(int d, long L) : dim(d), side(L) {
  n_sites = 1;
  for (int k = 0; k < dim; ++k) n_sites *= side;
}

void TorusGeometry::coords_of(long site, int* out) const {
  for (int k = 0; k < dim; ++k) {
    out[k] = static_cast<int>(site % side);
    site /= side;
  }
}

long TorusGeometry::index_of(const int* coords) const {
  long idx = 0;
  for (int k = dim - 1; k >= 0; --k) idx = idx * side + coords[k];
  return idx;
}

long TorusGeometry::wrap_neighbor(long site,
                                  const std::vector<int>& offset) const {
  long idx = 0;
  long stride = 1;
  for (int k = 0; k < dim; ++k) {
    long c = site % side;
    site /= side;
    long w = c + offset[k];
    w %= side;
    if (w < 0) w += side;
    idx += w * stride;
    stride *= side;
  }
  return idx;
}

NeighborTable build_neighbor_table(const TorusGeometry& geom,
                                   const NeighborhoodTemplate& tmpl) {
  NeighborTable table;
  table.n = tmpl.size;
  const double bytes = static_cast<double>(geom.n_sites) * tmpl.size * 8.0;
  if (bytes > 2.0e9)
    throw ResourceCapError("neighbor table would exceed 2 GB");
  table.flat.resize(geom.n_sites * tmpl.size);
  for (long s = 0; s < geom.n_sites; ++s)
    for (long k = 0; k < tmpl.size; ++k)
      table.flat[s * tmpl.size + k] = geom.wrap_neighbor(s, tmpl.offsets[k]);
  return table;
}

std::array<long, 3> SpatialConfig::recount() const {
  std::array<long, 3> c{0, 0, 0};
  for (std::uint8_t s : states) ++c[s];
  return c;
}

SpatialConfig sample_initial(long side, int dim, double p1, double p2,
                             Rng& rng) {
  if (p1 < 0.0 || p2 < 0.0 || p1 + p2 > 1.0)
    throw ConfigError("initial densities need p1, p2 >= 0 and p1 + p2 <= 1");
  SpatialConfig config(dim, side);
  for (long s = 0; s < config.n_sites(); ++s) {
    double u = rng.uniform01();
    if (u < p1)
      config.set(s, kInhibitory);
    else if (u < p1 + p2)
      config.set(s, kSusceptible);
  }
  return config;
}

double local_fraction(const SpatialConfig& config, long site, int species,
                      const NeighborhoodTemplate& tmpl) {
  TorusGeometry geom(config.dim, config.side);
  long hits = 0;
  for (const auto& off : tmpl.offsets)
    if (config.at(geom.wrap_neighbor(site, off)) == species) ++hits;
  return static_cast<double>(hits) / static_cast<double>(tmpl.size);
}

SiteRates site_rates(const SpatialConfig& config, long site,
                     const ModelParams& params,
                     const NeighborhoodTemplate& tmpl) {
  SiteRates r;
  switch (config.at(site)) {
    case kEmpty:
      r.rate_to[kInhibitory] =
          params.beta1 * local_fraction(config, site, kInhibitory, tmpl);
      r.rate_to[kSusceptible] =
          params.beta2 * local_fraction(config, site, kSusceptible, tmpl);
      break;
    case kInhibitory:
      r.rate_to[kEmpty] = 1.0;
      break;
    case kSusceptible:
      r.rate_to[kEmpty] =
          1.0 + params.gamma * local_fraction(config, site, kInhibitory, tmpl);
      break;
    default:
      break;
  }
  return r;
}

}  // namespace allelo
