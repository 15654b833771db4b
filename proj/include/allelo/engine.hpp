#ifndef ALLELO_ENGINE_HPP
#define ALLELO_ENGINE_HPP

#include <array>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "allelo/events.hpp"
#include "allelo/lattice.hpp"

namespace allelo {

// Densities and counts at the requested sample times; rho0+rho1+rho2 = 1.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<std::array<double, 3>> densities;
  std::vector<std::array<long, 3>> counts;
  std::vector<std::pair<double, SpatialConfig>> snapshots;
};

enum class Outcome {
  kSpecies1Wins,
  kSpecies2Wins,
  kBothExtinct,
  kCoexistAtHorizon,
};

const char* outcome_name(Outcome o);

struct SampleSpec {
  std::vector<double> times;           // sorted; horizon appended if missing
  std::vector<double> snapshot_times;  // sorted
};

SampleSpec uniform_samples(double horizon, int count);

struct SimResult {
  ObservableSeries series;
  Outcome outcome = Outcome::kCoexistAtHorizon;
  // first time the species count reached zero; NaN if it never did
  double extinction_time1 = std::numeric_limits<double>::quiet_NaN();
  double extinction_time2 = std::numeric_limits<double>::quiet_NaN();
  SpatialConfig final_config;
  std::optional<EventLog> log;  // populated in recorded mode
};

// Applies one event of the allelopathic graphical representation.
// Cross: head empties.  Birth arrow i: head becomes i iff tail = i and head
// empty.  Kill arrow: head empties iff tail = 1 and head = 2.
// Returns true when the head site changed.
bool apply_event(SpatialConfig& config, const GraphEvent& e);

// Symmetric variant used by the dual-process checks (gamma = 0 logs): both
// birth labels act as plain birth arrows through which any occupied tail
// gives birth, the head taking the tail's type.  Kill arrows are rejected.
bool apply_event_symmetric(SpatialConfig& config, const GraphEvent& e);

// Continuous-time trajectory of the model whose generator the event rules
// realize; deterministic given (seed, stream).  Recorded mode retains the
// event log (subject to max_recorded).
SimResult simulate(const SpatialConfig& initial, const ModelParams& params,
                   double horizon, std::uint64_t seed, std::uint64_t stream,
                   const SampleSpec& samples, bool record = false,
                   long max_recorded = kDefaultEventCap);

// Re-applies a recorded log to an initial configuration.
SimResult replay(const SpatialConfig& initial, const EventLog& log,
                 const SampleSpec& samples, bool symmetric = false);

// Labels a completed series by its final counts (extinction is absorbing,
// so a zero count at any sample time already decides that species).
Outcome classify_outcome(const ObservableSeries& series);

// CSV with header t,rho0,rho1,rho2,count1,count2
void write_density_csv(std::ostream& os, const ObservableSeries& series);

// Binary pixmap (P6), d = 2 only: empty white, species 1 black, species 2
// gray.
void write_ppm(std::ostream& os, const SpatialConfig& config);

}  // namespace allelo

#endif
