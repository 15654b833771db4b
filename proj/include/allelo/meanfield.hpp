#ifndef ALLELO_MEANFIELD_HPP
#define ALLELO_MEANFIELD_HPP

#include <array>
#include <complex>
#include <iosfwd>
#include <vector>

#include "allelo/lattice.hpp"

namespace allelo {

// Homogeneous-mixing densities (u1, u2) on the simplex u1, u2 >= 0,
// u1 + u2 <= 1.
struct DensityPair {
  double u1 = 0.0;
  double u2 = 0.0;
};

bool in_simplex(DensityPair u, double tol = 0.0);

// F1 = beta1 u1 (1 - u1 - u2) - u1
// F2 = beta2 u2 (1 - u1 - u2) - (1 + gamma u1) u2
std::array<double, 2> rhs(DensityPair u, const ModelParams& p);

struct Jacobian {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
  std::array<std::complex<double>, 2> eigenvalues() const;
  double det() const { return a11 * a22 - a12 * a21; }
  double trace() const { return a11 + a22; }
};

Jacobian jacobian(DensityPair u, const ModelParams& p);

enum class Stability { kStable, kUnstable, kSaddle, kMarginal, kUndefined };
enum class LimitPrediction { kToP0, kToP1, kToP2, kBistable, kMarginal };

const char* stability_name(Stability s);
const char* limit_name(LimitPrediction l);

struct FixedPointInfo {
  bool defined = false;     // p12 needs gamma > 0 and beta1 > 0
  DensityPair location;
  bool in_simplex = false;
  double residual = 0.0;    // ||rhs(p)||_2
  std::array<std::complex<double>, 2> eigenvalues{};
  Stability stability = Stability::kUndefined;
};

struct FixedPointReport {
  ModelParams params;
  FixedPointInfo p0, p1, p2, p12;
  bool in_b0 = false, in_b1 = false, in_b2 = false;
  bool marginal = false;        // some defining inequality within tolerance
  double det_j12_closed = 0.0;  // -u1bar ((1+gamma) beta1 - gamma - beta2)
  double det_j12_eigen = 0.0;   // product of the p12 eigenvalues
  LimitPrediction predicted = LimitPrediction::kMarginal;
};

constexpr double kRegionTol = 1e-9;

// Fixed-point locations, simplex membership and residuals.
FixedPointReport fixed_points(const ModelParams& p);

// fixed_points plus stability labels, region flags and the predicted limit.
FixedPointReport classify(const ModelParams& p);

// -beta1/u2 - beta2/u1 (interior points only).
double dulac_divergence(DensityPair u, const ModelParams& p);

// Central-difference divergence of (phi F1, phi F2), phi = 1/(u1 u2).
double dulac_divergence_fd(DensityPair u, const ModelParams& p,
                           double h = 1e-4);

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double converge_dist = 1e-6;    // distance to a fixed point...
  double converge_speed = 1e-10;  // ...and speed, for "converged"
  bool store_trace = false;
  double trace_dt = 0.0;  // 0: every accepted step
};

struct IntegrationResult {
  DensityPair final_state;
  double t_final = 0.0;
  bool converged = false;
  int limit_label = -1;  // 0..3 = p0,p1,p2,p12; -1 undecided
  double nearest_fixed_point_distance = 0.0;
  double final_speed = 0.0;
  bool step_failure = false;
  std::vector<double> trace_times;
  std::vector<DensityPair> trace_states;
};

// Adaptive Dormand-Prince integration of the planar field, with early exit
// once a fixed point is reached.
IntegrationResult integrate(DensityPair u0, const ModelParams& p,
                            double t_max,
                            const IntegratorOptions& opts = {});

struct BasinCell {
  double u1 = 0.0, u2 = 0.0;
  int label = -1;  // 0..3 fixed-point labels, -1 undecided
  double t_converge = -1.0;
};

struct BasinMap {
  int resolution = 0;
  std::vector<BasinCell> cells;
  // fraction of decided interior cells (axes excluded) per limit label
  std::array<double, 4> interior_area_fraction{0, 0, 0, 0};
  long undecided = 0;
};

BasinMap basin_map(const ModelParams& p, int resolution, double t_max,
                   int workers = 1);

void write_fixed_point_csv(std::ostream& os, const FixedPointReport& r);
void write_trajectory_csv(std::ostream& os, const IntegrationResult& r);
void write_basin_csv(std::ostream& os, const BasinMap& m);

}  // namespace allelo

#endif
