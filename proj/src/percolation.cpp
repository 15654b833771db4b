#include "allelo/percolation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "allelo/rng.hpp"

namespace allelo {

namespace {

long grid_size(int d, long width) {
  long w = 2 * width + 1;
  double total = 1.0;
  long n = 1;
  for (int k = 0; k < d; ++k) {
    total *= static_cast<double>(w);
    n *= w;
  }
  if (total > 5.0e8) throw ResourceCapError("percolation grid too large");
  return n;
}

bool parity_even(const std::vector<int>& m, int n) {
  long s = n;
  for (int v : m) s += v;
  return (s % 2 + 2) % 2 == 0;
}

double site_uniform(std::uint64_t seed, std::uint64_t stream, long site_code,
                    int level) {
  auto block = Rng::philox_block(seed, stream, static_cast<std::uint64_t>(site_code),
                                 static_cast<std::uint64_t>(level),
                                 0x70657263ULL /* domain tag */);
  return Rng::to_unit(block[0]);
}

}  // namespace

long PercSample::grid_index(const std::vector<int>& m) const {
  long w = 2 * width + 1;
  long idx = 0;
  for (int k = d - 1; k >= 0; --k) {
    long c = m[k] + width;
    idx = idx * w + c;
  }
  return idx;
}

bool PercSample::is_wet(const std::vector<int>& m, int n) const {
  for (int v : m)
    if (v < -width || v > width) return false;
  if (n < 0 || n > n_max) return false;
  return wet[n][grid_index(m)] != 0;
}

bool PercSample::is_open(const std::vector<int>& m, int n, std::uint64_t seed,
                         std::uint64_t stream) const {
  return site_uniform(seed, stream, grid_index(m), n) < p;
}

PercSample percolate(double p, int d, int n_max, long width,
                     std::uint64_t seed, std::uint64_t stream,
                     bool all_wet_level0) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0,1]");
  if (d < 1) throw ConfigError("dimension must be >= 1");
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
  if (width < 1) throw ConfigError("width must be >= 1");

  PercSample sample;
  sample.d = d;
  sample.n_max = n_max;
  sample.width = width;
  sample.p = p;
  sample.all_wet_level0 = all_wet_level0;

  const long n_grid = grid_size(d, width);
  const long w = 2 * width + 1;
  sample.wet.assign(n_max + 1, std::vector<std::uint8_t>(n_grid, 0));
  sample.origin_cluster.assign(n_max + 1,
                               std::vector<std::uint8_t>(n_grid, 0));
  sample.wet_density.assign(n_max + 1, 0.0);

  std::vector<int> m(d);
  auto decode = [&](long idx) {
    for (int k = 0; k < d; ++k) {
      m[k] = static_cast<int>(idx % w) - static_cast<int>(width);
      idx /= w;
    }
  };

  const long origin = sample.grid_index(std::vector<int>(d, 0));
  std::vector<long> strides(d, 1);
  for (int k = 1; k < d; ++k) strides[k] = strides[k - 1] * w;

  for (int n = 0; n <= n_max; ++n) {
    long wet_count = 0, parity_count = 0;
    bool any = false;
    for (long idx = 0; idx < n_grid; ++idx) {
      decode(idx);
      if (!parity_even(m, n)) continue;
      ++parity_count;
      bool open = site_uniform(seed, stream, idx, n) < p;
      if (!open) continue;
      bool from_wet = false, from_origin = false;
      if (n == 0) {
        from_wet = all_wet_level0 || idx == origin;
        from_origin = idx == origin;
      } else {
        for (int k = 0; k < d && !(from_wet && from_origin); ++k) {
          for (int step : {-1, +1}) {
            int c = m[k] + step;
            if (c < -width || c > width) continue;
            long nb = idx + step * strides[k];
            from_wet = from_wet || sample.wet[n - 1][nb];
            from_origin = from_origin || sample.origin_cluster[n - 1][nb];
          }
        }
      }
      if (from_wet) {
        sample.wet[n][idx] = 1;
        ++wet_count;
        any = true;
      }
      if (from_origin) {
        sample.origin_cluster[n][idx] = 1;
        any = true;
      }
    }
    sample.wet_density[n] =
        parity_count > 0 ? static_cast<double>(wet_count) / parity_count : 0.0;
    if (!any && n > 0) break;  // nothing can get wet above an empty level
  }

  for (long idx = 0; idx < n_grid; ++idx)
    if (sample.origin_cluster[n_max][idx]) {
      sample.origin_reached_top = true;
      break;
    }
  return sample;
}

PercSample percolate(double p, int d, int n_max, std::uint64_t seed,
                     std::uint64_t stream, bool all_wet_level0) {
  return percolate(p, d, n_max, static_cast<long>(n_max) + 1, seed, stream,
                   all_wet_level0);
}

namespace {

// survival-only walk of the origin cluster, rolling two levels
bool origin_survives(double p, int d, int n_max, std::uint64_t seed,
                     std::uint64_t stream) {
  long width = n_max + 1;
  long n_grid = grid_size(d, width);
  long w = 2 * width + 1;
  std::vector<std::uint8_t> prev(n_grid, 0), cur(n_grid, 0);
  std::vector<int> m(d);
  auto decode = [&](long idx) {
    for (int k = 0; k < d; ++k) {
      m[k] = static_cast<int>(idx % w) - static_cast<int>(width);
      idx /= w;
    }
  };
  long origin = 0;
  {
    std::vector<int> zero(d, 0);
    long idx = 0;
    for (int k = d - 1; k >= 0; --k) idx = idx * w + (zero[k] + width);
    origin = idx;
  }
  if (!(site_uniform(seed, stream, origin, 0) < p)) return false;
  prev[origin] = 1;
  if (n_max == 0) return true;

  std::vector<long> strides(d, 1);
  for (int k = 1; k < d; ++k) strides[k] = strides[k - 1] * w;

  for (int n = 1; n <= n_max; ++n) {
    bool any = false;
    std::fill(cur.begin(), cur.end(), 0);
    for (long idx = 0; idx < n_grid; ++idx) {
      decode(idx);
      if (!parity_even(m, n)) continue;
      bool reachable = false;
      for (int k = 0; k < d && !reachable; ++k)
        for (int step : {-1, +1}) {
          int c = m[k] + step;
          if (c < -width || c > width) continue;
          if (prev[idx + step * strides[k]]) {
            reachable = true;
            break;
          }
        }
      if (!reachable) continue;
      if (site_uniform(seed, stream, idx, n) < p) {
        cur[idx] = 1;
        any = true;
      }
    }
    if (!any) return false;
    std::swap(prev, cur);
  }
  return true;
}

}  // namespace

ThetaEstimate estimate_theta(double p, int d, int n_max, int reps,
                             std::uint64_t seed, std::uint32_t slot) {
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0,1]");
  ThetaEstimate est;
  est.p = p;
  est.d = d;
  est.n_max = n_max;
  est.reps = reps;
  for (int r = 0; r < reps; ++r)
    if (origin_survives(p, d, n_max, seed,
                        make_stream(slot, static_cast<std::uint32_t>(r))))
      ++est.survived;
  est.theta_hat = static_cast<double>(est.survived) / reps;

  const double z = 1.959963984540054;  // 95%
  double n = reps, k = est.survived;
  double denom = n + z * z;
  double center = (k + z * z / 2.0) / denom;
  double half = z * std::sqrt(k * (n - k) / n + z * z / 4.0) / denom;
  est.ci_lo = std::max(0.0, center - half);
  est.ci_hi = std::min(1.0, center + half);
  return est;
}

void write_theta_csv(std::ostream& os,
                     const std::vector<ThetaEstimate>& rows) {
  os << "p,reps,n_max,theta_hat,ci_lo,ci_hi\n";
  char buf[160];
  for (const ThetaEstimate& e : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g,%.17g\n", e.p,
                  e.reps, e.n_max, e.theta_hat, e.ci_lo, e.ci_hi);
    os << buf;
  }
}

}  // namespace allelo
