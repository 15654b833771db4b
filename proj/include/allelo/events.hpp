#ifndef ALLELO_EVENTS_HPP
#define ALLELO_EVENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "allelo/lattice.hpp"
#include "allelo/rng.hpp"

namespace allelo {

// Event kinds of the graphical representation.  Arrows carry the label of
// the update they encode: a kill arrow (label 0) lets a 1 at the tail empty
// a 2 at the head, birth arrows (labels 1 and 2) let the matching species
// give birth onto an empty head, and a cross empties its site.
enum class EventKind : std::uint8_t {
  kCross = 0,
  kBirth1 = 1,
  kBirth2 = 2,
  kKill = 3,
};

struct GraphEvent {
  double time = 0.0;
  EventKind kind = EventKind::kCross;
  long tail = 0;
  long head = 0;  // equals tail for crosses
};

constexpr long kDefaultEventCap = 20'000'000;

// Time-ordered record of the graphical representation on [t_begin, horizon],
// replayable deterministically from (seed, stream).
struct EventLog {
  double t_begin = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  ModelParams params;
  std::vector<GraphEvent> events;
};

// Lazy generator of the same event sequence, for streaming simulation and
// shared-log couplings that never materialize a log.  Kinds are caller
// defined: each kind has a per-site rate and either targets a uniformly
// chosen neighbor (arrow) or the site itself (cross-like).  One aggregate
// Poisson stream of total rate n_sites * sum(rates) is drawn and the kind,
// tail and neighbor are attributed uniformly, which by superposition agrees
// in law with independent per-edge and per-vertex clocks.
struct KindSpec {
  double rate = 0.0;  // per site
  bool arrow = true;
};

struct RawEvent {
  double time = 0.0;
  int kind = 0;
  long tail = 0;
  long head = 0;
};

class EventStream {
 public:
  EventStream(const TorusGeometry& geom, const NeighborTable* table,
              std::vector<KindSpec> kinds, double t_begin, double t_end,
              std::uint64_t seed, std::uint64_t stream);

  // Advances to the next event; returns false once past the end time.
  bool next(RawEvent& out);

  double total_rate() const { return total_rate_; }

 private:
  const TorusGeometry geom_;
  const NeighborTable* table_;
  std::vector<KindSpec> kinds_;
  std::vector<int> active_;  // indices of kinds with positive rate
  std::vector<double> active_rates_;
  double t_;
  double t_end_;
  double total_rate_;
  double site_rate_;
  Rng rng_;
};

// The four standard kinds of the allelopathic model, indexed by EventKind.
std::vector<KindSpec> standard_kinds(const ModelParams& params);

// Materializes the graphical representation on [0, horizon].
EventLog generate_events(const ModelParams& params, double horizon,
                         std::uint64_t seed, std::uint64_t stream = 0,
                         long max_events = kDefaultEventCap);

// Same with an explicit window; t_begin may be negative (clocks extended to
// negative times for renewal analysis).
EventLog generate_events_window(const ModelParams& params, double t_begin,
                                double t_end, std::uint64_t seed,
                                std::uint64_t stream = 0,
                                long max_events = kDefaultEventCap);

// Line-oriented text form, one `time kind tail head` per line.
void write_event_log(std::ostream& os, const EventLog& log);
EventLog read_event_log(std::istream& is);

}  // namespace allelo

#endif
