#ifndef ALLELO_DUAL_HPP
#define ALLELO_DUAL_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <vector>

#include "allelo/engine.hpp"

namespace allelo {

// Dual machinery for gamma = 0 logs (contact process, and the symmetric
// two-type model where both birth labels act as plain birth arrows).  Logs
// containing kill arrows are rejected: that model has no tractable dual.

// Sites y admitting a dual path from (x, t) down to (y, t - s): crossing
// birth arrows head-to-tail and never meeting a cross on the way down.
std::set<long> dual_set(const EventLog& log, long x, double t, double s);

// Tree of lineage segments explored by the dual started at (x, t), down to
// dual time s_max.  Segment intervals are real-time; children attach at
// birth-arrow times inside the parent's interval.
struct DualSegment {
  long site = 0;
  double t_attach = 0.0;  // upper end (arrow time; t for the root)
  double t_end = 0.0;     // lower end (cross time, or the scan floor)
  int parent = -1;
};

struct DualTree {
  long root_site = 0;
  double root_time = 0.0;
  std::vector<DualSegment> segments;
};

DualTree build_dual_tree(const EventLog& log, long x, double t, double s_max);

struct DualityCheck {
  bool forward_occupied = false;
  bool dual_intersects_initial = false;
  bool agree = false;
};

// Occupancy duality: (x, t) is occupied in the forward (symmetric) process
// iff the dual set at dual time t meets the initially occupied set.  A
// correct build agrees on every realization.
DualityCheck check_duality(const SpatialConfig& initial, const EventLog& log,
                           long x, double t);

// Distinguished-particle trajectory: sits on its site going backward in
// time and, at a cross on that site, relocates to the live branch of the
// tree with the lowest priority index; dies when no branch remains.
// Branch priority is the lexicographic order of attachment-time chains,
// earliest attachment first (the branch nearest above a death mark is the
// first forward-in-time fill candidate for the emptied site).
struct AncestorPath {
  long start_site = 0;
  double start_time = 0.0;  // the query time t
  bool alive = true;
  double death_dual_time = -1.0;  // set when !alive
  // piecewise-constant trajectory: sites[i] is occupied on dual times
  // [jump_dual_times[i-1], jump_dual_times[i]) with jump_dual_times[-1]=0
  std::vector<long> sites;
  std::vector<double> jump_dual_times;

  // position at dual time s (path must be alive through s)
  long position(double s) const;
  long landing_site() const { return sites.back(); }
};

AncestorPath first_ancestor(const EventLog& log, long x, double t);

// If the first ancestor survives to dual time t and its landing site is
// initially occupied, that type; otherwise nullopt (undetermined).
std::optional<int> type_via_first_ancestor(const SpatialConfig& initial,
                                           const EventLog& log, long x,
                                           double t);

struct RenewalPoint {
  double dual_time = 0.0;
  double real_time = 0.0;
  long site = 0;
  bool lookahead_ok = false;  // log window covers the full lookahead
  bool flagged = false;       // dual of this point lives >= lookahead
};

struct RenewalScan {
  double lookahead = 0.0;
  std::vector<RenewalPoint> points;
  // (site displacement by coordinate, dual-time gap) between consecutive
  // flagged points, minimum-image on the torus
  std::vector<std::pair<std::vector<int>, double>> displacements;
};

// Flags the path's jump points whose own dual set stays nonempty for the
// full lookahead window ("lives forever" at desk scale).
RenewalScan renewal_scan(const AncestorPath& path, const EventLog& log,
                         double lookahead);

// CSV: dual_time,site_coords...,jump_flag,renewal_flag
void write_ancestor_csv(std::ostream& os, const AncestorPath& path,
                        const TorusGeometry& geom,
                        const RenewalScan* scan = nullptr);

}  // namespace allelo

#endif
