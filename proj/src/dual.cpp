#include "allelo/dual.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>

namespace allelo {

namespace {

// iterator range of events with t_lo < time <= t_hi, traversed backward
struct BackwardRange {
  const std::vector<GraphEvent>* events;
  std::ptrdiff_t first;  // highest index with time <= t_hi
  double t_lo;
};

BackwardRange backward_range(const EventLog& log, double t_hi, double t_lo) {
  auto it = std::upper_bound(
      log.events.begin(), log.events.end(), t_hi,
      [](double t, const GraphEvent& e) { return t < e.time; });
  return {&log.events, it - log.events.begin() - 1, t_lo};
}

void require_no_kills(const EventLog& log) {
  for (const GraphEvent& e : log.events)
    if (e.kind == EventKind::kKill)
      throw ConfigError("dual computations require a gamma = 0 log (kill "
                        "arrows present)");
}

bool is_birth(EventKind k) {
  return k == EventKind::kBirth1 || k == EventKind::kBirth2;
}

}  // namespace

std::set<long> dual_set(const EventLog& log, long x, double t, double s) {
  require_no_kills(log);
  if (!(s >= 0.0)) throw ConfigError("dual depth s must be >= 0");
  if (t > log.horizon) throw ConfigError("query time beyond the log horizon");
  if (t - s < log.t_begin)
    throw ConfigError("dual window reaches below the start of the log");

  std::set<long> active{x};
  BackwardRange range = backward_range(log, t, t - s);
  for (std::ptrdiff_t i = range.first; i >= 0; --i) {
    const GraphEvent& e = (*range.events)[i];
    if (e.time <= range.t_lo) break;
    if (e.kind == EventKind::kCross) {
      active.erase(e.head);
      if (active.empty()) break;
    } else if (is_birth(e.kind) && active.count(e.head)) {
      active.insert(e.tail);
    }
  }
  return active;
}

DualTree build_dual_tree(const EventLog& log, long x, double t, double s_max) {
  require_no_kills(log);
  if (!(0.0 <= s_max && s_max <= t)) throw ConfigError("need 0 <= s_max <= t");

  DualTree tree;
  tree.root_site = x;
  tree.root_time = t;
  tree.segments.push_back({x, t, t - s_max, -1});
  // site -> open segment index (the reduced tree keeps one live segment per
  // site; a second arrow into a live site refreshes priority, not structure)
  std::map<long, int> open{{x, 0}};

  BackwardRange range = backward_range(log, t, t - s_max);
  for (std::ptrdiff_t i = range.first; i >= 0; --i) {
    const GraphEvent& e = (*range.events)[i];
    if (e.time <= range.t_lo) break;
    if (e.kind == EventKind::kCross) {
      auto it = open.find(e.head);
      if (it != open.end()) {
        tree.segments[it->second].t_end = e.time;
        open.erase(it);
      }
    } else if (is_birth(e.kind)) {
      auto head_it = open.find(e.head);
      if (head_it != open.end() && !open.count(e.tail)) {
        tree.segments.push_back({e.tail, e.time, t - s_max, head_it->second});
        open[e.tail] = static_cast<int>(tree.segments.size()) - 1;
      }
    }
  }
  return tree;
}

namespace {

// forward symmetric-two-type state of site x at time t under the log;
// the initial configuration sits at time 0, so any negative-time extension
// of the log is ignored
std::uint8_t forward_state(const SpatialConfig& initial, const EventLog& log,
                           long x, double t) {
  SpatialConfig config = initial;
  for (const GraphEvent& e : log.events) {
    if (e.time > t) break;
    if (e.time <= 0.0) continue;
    apply_event_symmetric(config, e);
  }
  return config.at(x);
}

}  // namespace

DualityCheck check_duality(const SpatialConfig& initial, const EventLog& log,
                           long x, double t) {
  DualityCheck out;
  out.forward_occupied = forward_state(initial, log, x, t) != kEmpty;
  std::set<long> dual = dual_set(log, x, t, t);
  out.dual_intersects_initial = false;
  for (long y : dual)
    if (initial.at(y) != kEmpty) {
      out.dual_intersects_initial = true;
      break;
    }
  out.agree = out.forward_occupied == out.dual_intersects_initial;
  return out;
}

long AncestorPath::position(double s) const {
  std::size_t idx =
      std::upper_bound(jump_dual_times.begin(), jump_dual_times.end(), s) -
      jump_dual_times.begin();
  if (idx >= sites.size()) idx = sites.size() - 1;
  return sites[idx];
}

AncestorPath first_ancestor(const EventLog& log, long x, double t) {
  require_no_kills(log);
  if (t > log.horizon) throw ConfigError("query time beyond the log horizon");

  AncestorPath path;
  path.start_site = x;
  path.start_time = t;
  path.sites.push_back(x);

  // live branches, one per site: priority key = chain of attachment times
  // from the root, lexicographically smallest = highest priority
  std::map<long, std::vector<double>> alive;
  alive[x] = {};
  long current = x;

  BackwardRange range = backward_range(log, t, 0.0);
  for (std::ptrdiff_t i = range.first; i >= 0; --i) {
    const GraphEvent& e = (*range.events)[i];
    if (e.time <= range.t_lo) break;
    if (e.kind == EventKind::kCross) {
      auto it = alive.find(e.head);
      if (it == alive.end()) continue;
      bool was_current = e.head == current;
      alive.erase(it);
      if (!was_current) continue;
      double s_jump = t - e.time;
      if (alive.empty()) {
        path.alive = false;
        path.death_dual_time = s_jump;
        return path;
      }
      auto best = alive.begin();
      for (auto j = std::next(alive.begin()); j != alive.end(); ++j)
        if (j->second < best->second) best = j;
      current = best->first;
      path.jump_dual_times.push_back(s_jump);
      path.sites.push_back(current);
    } else if (is_birth(e.kind)) {
      auto head_it = alive.find(e.head);
      if (head_it == alive.end()) continue;
      std::vector<double> key = head_it->second;
      key.push_back(e.time);
      auto tail_it = alive.find(e.tail);
      if (tail_it == alive.end())
        alive.emplace(e.tail, std::move(key));
      else if (key < tail_it->second)
        tail_it->second = std::move(key);
    }
  }
  return path;
}

std::optional<int> type_via_first_ancestor(const SpatialConfig& initial,
                                           const EventLog& log, long x,
                                           double t) {
  AncestorPath path = first_ancestor(log, x, t);
  if (!path.alive) return std::nullopt;
  std::uint8_t s = initial.at(path.landing_site());
  if (s == kEmpty) return std::nullopt;
  return static_cast<int>(s);
}

RenewalScan renewal_scan(const AncestorPath& path, const EventLog& log,
                         double lookahead) {
  if (lookahead < 0.0) throw ConfigError("lookahead must be >= 0");
  RenewalScan scan;
  scan.lookahead = lookahead;

  for (std::size_t j = 0; j < path.jump_dual_times.size(); ++j) {
    RenewalPoint p;
    p.dual_time = path.jump_dual_times[j];
    p.real_time = path.start_time - p.dual_time;
    p.site = path.sites[j + 1];
    p.lookahead_ok = p.real_time - lookahead >= log.t_begin;
    if (p.lookahead_ok)
      p.flagged = !dual_set(log, p.site, p.real_time, lookahead).empty();
    scan.points.push_back(p);
  }

  // displacements between consecutive flagged points
  TorusGeometry geom(log.params.dim, log.params.side);
  std::vector<int> a(geom.dim), b(geom.dim);
  const RenewalPoint* prev = nullptr;
  for (const RenewalPoint& p : scan.points) {
    if (!p.flagged) continue;
    if (prev) {
      geom.coords_of(prev->site, a.data());
      geom.coords_of(p.site, b.data());
      std::vector<int> d(geom.dim);
      for (int k = 0; k < geom.dim; ++k) {
        int delta = b[k] - a[k];
        long L = geom.side;
        while (delta > L / 2) delta -= L;
        while (delta < -L / 2) delta += L;
        d[k] = delta;
      }
      scan.displacements.emplace_back(std::move(d),
                                      p.dual_time - prev->dual_time);
    }
    prev = &p;
  }
  return scan;
}

void write_ancestor_csv(std::ostream& os, const AncestorPath& path,
                        const TorusGeometry& geom, const RenewalScan* scan) {
  os << "dual_time";
  for (int k = 0; k < geom.dim; ++k) os << ",x" << k;
  os << ",jump_flag,renewal_flag\n";
  std::vector<int> c(geom.dim);
  char buf[64];
  auto row = [&](double s, long site, int jump, int renewal) {
    std::snprintf(buf, sizeof buf, "%.17g", s);
    os << buf;
    geom.coords_of(site, c.data());
    for (int k = 0; k < geom.dim; ++k) os << ',' << c[k];
    os << ',' << jump << ',' << renewal << '\n';
  };
  row(0.0, path.sites[0], 0, 0);
  for (std::size_t j = 0; j < path.jump_dual_times.size(); ++j) {
    int renewal = 0;
    if (scan && j < scan->points.size() && scan->points[j].flagged)
      renewal = 1;
    row(path.jump_dual_times[j], path.sites[j + 1], 1, renewal);
  }
  if (!path.alive) row(path.death_dual_time, path.sites.back(), 0, 0);
  return;
}

}  // namespace allelo
