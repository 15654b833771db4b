#include "allelo/meanfield.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

namespace allelo {

bool in_simplex(DensityPair u, double tol) {
  return u.u1 >= -tol && u.u2 >= -tol && u.u1 + u.u2 <= 1.0 + tol;
}

std::array<double, 2> rhs(DensityPair u, const ModelParams& p) {
  double free_space = 1.0 - u.u1 - u.u2;
  return {p.beta1 * u.u1 * free_space - u.u1,
          p.beta2 * u.u2 * free_space - (1.0 + p.gamma * u.u1) * u.u2};
}

std::array<std::complex<double>, 2> Jacobian::eigenvalues() const {
  double tr = trace(), de = det();
  double disc = tr * tr - 4.0 * de;
  if (disc >= 0.0) {
    double r = std::sqrt(disc);
    return {std::complex<double>((tr - r) / 2.0, 0.0),
            std::complex<double>((tr + r) / 2.0, 0.0)};
  }
  double r = std::sqrt(-disc);
  return {std::complex<double>(tr / 2.0, -r / 2.0),
          std::complex<double>(tr / 2.0, r / 2.0)};
}

Jacobian jacobian(DensityPair u, const ModelParams& p) {
  Jacobian j;
  j.a11 = p.beta1 * (1.0 - 2.0 * u.u1 - u.u2) - 1.0;
  j.a12 = -p.beta1 * u.u1;
  j.a21 = -(p.beta2 + p.gamma) * u.u2;
  j.a22 = p.beta2 * (1.0 - u.u1 - 2.0 * u.u2) - 1.0 - p.gamma * u.u1;
  return j;
}

const char* stability_name(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kSaddle: return "saddle";
    case Stability::kMarginal: return "marginal";
    case Stability::kUndefined: return "undefined";
  }
  return "?";
}

const char* limit_name(LimitPrediction l) {
  switch (l) {
    case LimitPrediction::kToP0: return "p0";
    case LimitPrediction::kToP1: return "p1";
    case LimitPrediction::kToP2: return "p2";
    case LimitPrediction::kBistable: return "bistable";
    case LimitPrediction::kMarginal: return "marginal";
  }
  return "?";
}

namespace {

double norm2(const std::array<double, 2>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1]);
}

Stability stability_from_eigs(const std::array<std::complex<double>, 2>& ev) {
  double r0 = ev[0].real(), r1 = ev[1].real();
  if (std::abs(r0) < kRegionTol || std::abs(r1) < kRegionTol)
    return Stability::kMarginal;
  if (r0 < 0.0 && r1 < 0.0) return Stability::kStable;
  if (r0 > 0.0 && r1 > 0.0) return Stability::kUnstable;
  return Stability::kSaddle;
}

FixedPointInfo make_info(bool defined, DensityPair loc,
                         const ModelParams& p) {
  FixedPointInfo info;
  info.defined = defined;
  if (!defined) return info;
  info.location = loc;
  info.in_simplex = in_simplex(loc);
  info.residual = norm2(rhs(loc, p));
  info.eigenvalues = jacobian(loc, p).eigenvalues();
  info.stability = stability_from_eigs(info.eigenvalues);
  return info;
}

}  // namespace

FixedPointReport fixed_points(const ModelParams& p) {
  FixedPointReport r;
  r.params = p;
  r.p0 = make_info(true, {0.0, 0.0}, p);
  r.p1 = make_info(p.beta1 > 0.0, {1.0 - 1.0 / p.beta1, 0.0}, p);
  r.p2 = make_info(p.beta2 > 0.0, {0.0, 1.0 - 1.0 / p.beta2}, p);
  if (p.gamma > 0.0 && p.beta1 > 0.0) {
    double u1bar = (p.beta2 / p.beta1 - 1.0) / p.gamma;
    double u2bar = 1.0 - 1.0 / p.beta1 - u1bar;
    r.p12 = make_info(true, {u1bar, u2bar}, p);
    // interior: strictly positive coordinates (the sum is 1 - 1/beta1 < 1)
    r.p12.in_simplex = u1bar > 0.0 && u2bar > 0.0 && u1bar + u2bar <= 1.0;
    r.det_j12_closed =
        -u1bar * ((1.0 + p.gamma) * p.beta1 - p.gamma - p.beta2);
    auto ev = r.p12.eigenvalues;
    r.det_j12_eigen = (ev[0] * ev[1]).real();
  }
  return r;
}

FixedPointReport classify(const ModelParams& p) {
  FixedPointReport r = fixed_points(p);
  double edge1 = (1.0 + p.gamma) * p.beta1 - p.gamma;  // bound on beta2 in B1
  // three-way comparisons: +1 / -1 when decided beyond the tolerance
  auto cmp = [](double a, double b) {
    if (a > b + kRegionTol) return +1;
    if (a < b - kRegionTol) return -1;
    return 0;
  };
  int b1_vs_1 = cmp(p.beta1, 1.0), b2_vs_1 = cmp(p.beta2, 1.0);
  int b2_vs_edge = cmp(p.beta2, edge1), b2_vs_b1 = cmp(p.beta2, p.beta1);
  bool b0_in = b1_vs_1 < 0 && b2_vs_1 < 0;
  bool b0_out = b1_vs_1 > 0 || b2_vs_1 > 0;
  bool b1_in = b1_vs_1 > 0 && b2_vs_edge < 0;
  bool b1_out = b1_vs_1 < 0 || b2_vs_edge > 0;
  bool b2_in = b2_vs_1 > 0 && b2_vs_b1 > 0;
  bool b2_out = b2_vs_1 < 0 || b2_vs_b1 < 0;
  r.in_b0 = b0_in;
  r.in_b1 = b1_in;
  r.in_b2 = b2_in;
  // marginal: some region membership is unresolved at the tolerance
  r.marginal = (!b0_in && !b0_out) || (!b1_in && !b1_out) ||
               (!b2_in && !b2_out);
  if (r.marginal)
    r.predicted = LimitPrediction::kMarginal;
  else if (r.in_b0)
    r.predicted = LimitPrediction::kToP0;
  else if (r.in_b1 && r.in_b2)
    r.predicted = LimitPrediction::kBistable;
  else if (r.in_b1)
    r.predicted = LimitPrediction::kToP1;
  else if (r.in_b2)
    r.predicted = LimitPrediction::kToP2;
  else
    r.predicted = LimitPrediction::kMarginal;
  return r;
}

double dulac_divergence(DensityPair u, const ModelParams& p) {
  if (!(u.u1 > 0.0 && u.u2 > 0.0))
    throw ConfigError("Dulac divergence needs an interior point");
  return -p.beta1 / u.u2 - p.beta2 / u.u1;
}

double dulac_divergence_fd(DensityPair u, const ModelParams& p, double h) {
  if (!(u.u1 > h && u.u2 > h))
    throw ConfigError("finite-difference stencil leaves the interior");
  auto phi_f = [&p](DensityPair v) -> std::array<double, 2> {
    auto f = rhs(v, p);
    double phi = 1.0 / (v.u1 * v.u2);
    return {phi * f[0], phi * f[1]};
  };
  double d1 = (phi_f({u.u1 + h, u.u2})[0] - phi_f({u.u1 - h, u.u2})[0]) /
              (2.0 * h);
  double d2 = (phi_f({u.u1, u.u2 + h})[1] - phi_f({u.u1, u.u2 - h})[1]) /
              (2.0 * h);
  return d1 + d2;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

struct Candidate {
  DensityPair loc;
  int label;
};

}  // namespace

IntegrationResult integrate(DensityPair u0, const ModelParams& p,
                            double t_max, const IntegratorOptions& opts) {
  if (!in_simplex(u0, 1e-12))
    throw ConfigError("initial state outside the simplex");

  FixedPointReport fps = fixed_points(p);
  std::vector<Candidate> targets;
  targets.push_back({fps.p0.location, 0});
  if (fps.p1.defined && fps.p1.in_simplex) targets.push_back({fps.p1.location, 1});
  if (fps.p2.defined && fps.p2.in_simplex) targets.push_back({fps.p2.location, 2});
  if (fps.p12.defined && fps.p12.in_simplex)
    targets.push_back({fps.p12.location, 3});

  IntegrationResult res;
  auto check_converged = [&](DensityPair u, double t) {
    double speed = norm2(rhs(u, p));
    double best = 1e300;
    int best_label = -1;
    for (const Candidate& c : targets) {
      double d = std::hypot(u.u1 - c.loc.u1, u.u2 - c.loc.u2);
      if (d < best) {
        best = d;
        best_label = c.label;
      }
    }
    res.nearest_fixed_point_distance = best;
    res.final_speed = speed;
    if (best <= opts.converge_dist && speed <= opts.converge_speed) {
      res.converged = true;
      res.limit_label = best_label;
      res.final_state = u;
      res.t_final = t;
      return true;
    }
    return false;
  };

  double t = 0.0;
  DensityPair u = u0;
  double last_trace = -1e300;
  auto trace = [&](double tt, DensityPair uu) {
    if (!opts.store_trace) return;
    if (tt - last_trace < opts.trace_dt && tt != 0.0 && tt < t_max) return;
    res.trace_times.push_back(tt);
    res.trace_states.push_back(uu);
    last_trace = tt;
  };
  trace(0.0, u);
  if (check_converged(u, 0.0)) return res;

  auto f = [&p](DensityPair v) { return rhs(v, p); };
  std::array<double, 2> k1 = f(u);
  double h = 1e-3;
  int rejects_in_a_row = 0;

  while (t < t_max) {
    if (h > t_max - t) h = t_max - t;
    DensityPair u2{u.u1 + h * kA21 * k1[0], u.u2 + h * kA21 * k1[1]};
    auto k2 = f(u2);
    DensityPair u3{u.u1 + h * (kA31 * k1[0] + kA32 * k2[0]),
                   u.u2 + h * (kA31 * k1[1] + kA32 * k2[1])};
    auto k3 = f(u3);
    DensityPair u4{u.u1 + h * (kA41 * k1[0] + kA42 * k2[0] + kA43 * k3[0]),
                   u.u2 + h * (kA41 * k1[1] + kA42 * k2[1] + kA43 * k3[1])};
    auto k4 = f(u4);
    DensityPair u5{
        u.u1 + h * (kA51 * k1[0] + kA52 * k2[0] + kA53 * k3[0] + kA54 * k4[0]),
        u.u2 +
            h * (kA51 * k1[1] + kA52 * k2[1] + kA53 * k3[1] + kA54 * k4[1])};
    auto k5 = f(u5);
    DensityPair u6{u.u1 + h * (kA61 * k1[0] + kA62 * k2[0] + kA63 * k3[0] +
                               kA64 * k4[0] + kA65 * k5[0]),
                   u.u2 + h * (kA61 * k1[1] + kA62 * k2[1] + kA63 * k3[1] +
                               kA64 * k4[1] + kA65 * k5[1])};
    auto k6 = f(u6);
    DensityPair unew{u.u1 + h * (kB1 * k1[0] + kB3 * k3[0] + kB4 * k4[0] +
                                 kB5 * k5[0] + kB6 * k6[0]),
                     u.u2 + h * (kB1 * k1[1] + kB3 * k3[1] + kB4 * k4[1] +
                                 kB5 * k5[1] + kB6 * k6[1])};
    auto k7 = f(unew);

    std::array<double, 2> err{
        h * (kE1 * k1[0] + kE3 * k3[0] + kE4 * k4[0] + kE5 * k5[0] +
             kE6 * k6[0] + kE7 * k7[0]),
        h * (kE1 * k1[1] + kE3 * k3[1] + kE4 * k4[1] + kE5 * k5[1] +
             kE6 * k6[1] + kE7 * k7[1])};
    double s1 = opts.abs_tol +
                opts.rel_tol * std::max(std::abs(u.u1), std::abs(unew.u1));
    double s2 = opts.abs_tol +
                opts.rel_tol * std::max(std::abs(u.u2), std::abs(unew.u2));
    double errnorm = std::sqrt(0.5 * ((err[0] / s1) * (err[0] / s1) +
                                      (err[1] / s2) * (err[1] / s2)));

    if (errnorm <= 1.0) {
      t += h;
      u = unew;
      k1 = k7;  // first-same-as-last
      rejects_in_a_row = 0;
      trace(t, u);
      if (check_converged(u, t)) return res;
    } else if (++rejects_in_a_row > 60) {
      res.step_failure = true;
      break;
    }
    double factor = errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < 1e-14) {
      res.step_failure = true;
      break;
    }
  }

  res.final_state = u;
  res.t_final = t;
  check_converged(u, t);
  return res;
}

BasinMap basin_map(const ModelParams& p, int resolution, double t_max,
                   int workers) {
  if (resolution < 2) throw ConfigError("basin resolution must be >= 2");
  BasinMap map;
  map.resolution = resolution;

  std::vector<std::pair<int, int>> nodes;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      if (i + j <= resolution - 1) nodes.emplace_back(i, j);
  map.cells.resize(nodes.size());

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    IntegratorOptions opts;
    for (;;) {
      std::size_t idx = cursor.fetch_add(1);
      if (idx >= nodes.size()) return;
      auto [i, j] = nodes[idx];
      double u1 = static_cast<double>(i) / (resolution - 1);
      double u2 = static_cast<double>(j) / (resolution - 1);
      IntegrationResult r = integrate({u1, u2}, p, t_max, opts);
      map.cells[idx] = {u1, u2, r.converged ? r.limit_label : -1,
                        r.converged ? r.t_final : -1.0};
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::array<long, 4> counts{0, 0, 0, 0};
  long interior = 0;
  for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
    auto [i, j] = nodes[idx];
    if (i == 0 || j == 0) continue;  // axes are invariant manifolds
    ++interior;
    int label = map.cells[idx].label;
    if (label < 0)
      ++map.undecided;
    else
      ++counts[label];
  }
  if (interior > 0)
    for (int l = 0; l < 4; ++l)
      map.interior_area_fraction[l] =
          static_cast<double>(counts[l]) / static_cast<double>(interior);
  return map;
}

namespace {
void print_pair(std::ostream& os, const char* name, const FixedPointInfo& fp) {
  char buf[256];
  if (!fp.defined) {
    os << name << ",undefined,,,,,,,\n";
    return;
  }
  std::snprintf(buf, sizeof buf, "%s,defined,%.17g,%.17g,%d,%.3g,%.17g,%.17g,%s\n",
                name, fp.location.u1, fp.location.u2, fp.in_simplex ? 1 : 0,
                fp.residual, fp.eigenvalues[0].real(),
                fp.eigenvalues[1].real(), stability_name(fp.stability));
  os << buf;
}
}  // namespace

void write_fixed_point_csv(std::ostream& os, const FixedPointReport& r) {
  os << "point,status,u1,u2,in_simplex,residual,eig1_re,eig2_re,stability\n";
  print_pair(os, "p0", r.p0);
  print_pair(os, "p1", r.p1);
  print_pair(os, "p2", r.p2);
  print_pair(os, "p12", r.p12);
  os << "# regions,b0=" << r.in_b0 << ",b1=" << r.in_b1 << ",b2=" << r.in_b2
     << ",marginal=" << r.marginal << ",predicted=" << limit_name(r.predicted)
     << "\n";
}

void write_trajectory_csv(std::ostream& os, const IntegrationResult& r) {
  os << "t,u1,u2\n";
  char buf[128];
  for (std::size_t i = 0; i < r.trace_times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.trace_times[i],
                  r.trace_states[i].u1, r.trace_states[i].u2);
    os << buf;
  }
}

void write_basin_csv(std::ostream& os, const BasinMap& m) {
  os << "u1,u2,label,t_converge\n";
  char buf[128];
  for (const BasinCell& c : m.cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", c.u1, c.u2,
                  c.label, c.t_converge);
    os << buf;
  }
}

}  // namespace allelo
