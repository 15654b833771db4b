#include "allelo/events.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace allelo {

EventStream::EventStream(const TorusGeometry& geom, const NeighborTable* table,
                         std::vector<KindSpec> kinds, double t_begin,
                         double t_end, std::uint64_t seed,
                         std::uint64_t stream)
    : geom_(geom),
      table_(table),
      kinds_(std::move(kinds)),
      t_(t_begin),
      t_end_(t_end),
      rng_(seed, stream) {
  if (!(t_end > t_begin)) throw ConfigError("event window must have t_end > t_begin");
  site_rate_ = 0.0;
  for (int i = 0; i < static_cast<int>(kinds_.size()); ++i) {
    if (kinds_[i].rate < 0.0) throw ConfigError("negative event rate");
    if (kinds_[i].rate > 0.0) {
      active_.push_back(i);
      active_rates_.push_back(kinds_[i].rate);
      site_rate_ += kinds_[i].rate;
    }
  }
  total_rate_ = site_rate_ * static_cast<double>(geom_.n_sites);
}

bool EventStream::next(RawEvent& out) {
  if (active_.empty()) return false;
  double t_next = t_ + rng_.exponential(total_rate_);
  // enforce strictly increasing times against floating-point collapse
  while (t_next <= t_) t_next = t_ + rng_.exponential(total_rate_);
  if (t_next > t_end_) return false;
  t_ = t_next;

  out.time = t_;
  long site = static_cast<long>(rng_.below(geom_.n_sites));
  out.tail = site;
  int k = active_[0];
  if (active_.size() > 1)
    k = active_[rng_.pick_weighted(active_rates_,
                                   static_cast<int>(active_.size()),
                                   site_rate_)];
  out.kind = k;
  if (kinds_[k].arrow) {
    long j = static_cast<long>(rng_.below(table_->n));
    out.head = table_->at(site, j);
  } else {
    out.head = site;
  }
  return true;
}

std::vector<KindSpec> standard_kinds(const ModelParams& params) {
  return {
      {1.0, false},          // cross
      {params.beta1, true},  // birth arrow, label 1
      {params.beta2, true},  // birth arrow, label 2
      {params.gamma, true},  // kill arrow, label 0
  };
}

EventLog generate_events(const ModelParams& params, double horizon,
                         std::uint64_t seed, std::uint64_t stream,
                         long max_events) {
  return generate_events_window(params, 0.0, horizon, seed, stream,
                                max_events);
}

EventLog generate_events_window(const ModelParams& params, double t_begin,
                                double t_end, std::uint64_t seed,
                                std::uint64_t stream, long max_events) {
  params.validate();
  if (!(t_end > t_begin)) throw ConfigError("horizon must be positive");
  TorusGeometry geom(params.dim, params.side);
  NeighborhoodTemplate tmpl =
      build_neighborhood(params.dim, params.range, params.side);
  NeighborTable table = build_neighbor_table(geom, tmpl);

  EventLog log;
  log.t_begin = t_begin;
  log.horizon = t_end;
  log.seed = seed;
  log.stream = stream;
  log.params = params;

  EventStream src(geom, &table, standard_kinds(params), t_begin, t_end, seed,
                  stream);
  RawEvent e;
  while (src.next(e)) {
    if (static_cast<long>(log.events.size()) >= max_events)
      throw ResourceCapError("recorded event log exceeds the configured cap of " +
                             std::to_string(max_events) + " events");
    log.events.push_back({e.time, static_cast<EventKind>(e.kind), e.tail,
                          e.head});
  }
  return log;
}

static const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::kCross: return "cross";
    case EventKind::kBirth1: return "birth1";
    case EventKind::kBirth2: return "birth2";
    case EventKind::kKill: return "kill";
  }
  return "?";
}

void write_event_log(std::ostream& os, const EventLog& log) {
  char buf[64];
  for (const GraphEvent& e : log.events) {
    std::snprintf(buf, sizeof buf, "%.17g", e.time);
    os << buf << ' ' << kind_name(e.kind) << ' ' << e.tail << ' ' << e.head
       << '\n';
  }
}

EventLog read_event_log(std::istream& is) {
  EventLog log;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    GraphEvent e;
    std::string kind;
    ls >> e.time >> kind >> e.tail >> e.head;
    if (!ls) throw ConfigError("malformed event log line: " + line);
    if (kind == "cross")
      e.kind = EventKind::kCross;
    else if (kind == "birth1")
      e.kind = EventKind::kBirth1;
    else if (kind == "birth2")
      e.kind = EventKind::kBirth2;
    else if (kind == "kill")
      e.kind = EventKind::kKill;
    else
      throw ConfigError("unknown event kind: " + kind);
    log.events.push_back(e);
  }
  if (!log.events.empty()) {
    log.t_begin = log.events.front().time;
    log.horizon = log.events.back().time;
  }
  return log;
}

}  // namespace allelo
