#include "allelo/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace allelo {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kSpecies1Wins: return "species1_wins";
    case Outcome::kSpecies2Wins: return "species2_wins";
    case Outcome::kBothExtinct: return "both_extinct";
    case Outcome::kCoexistAtHorizon: return "coexist_at_horizon";
  }
  return "?";
}

SampleSpec uniform_samples(double horizon, int count) {
  SampleSpec spec;
  if (count < 1) count = 1;
  for (int i = 1; i <= count; ++i)
    spec.times.push_back(horizon * static_cast<double>(i) / count);
  return spec;
}

bool apply_event(SpatialConfig& config, const GraphEvent& e) {
  switch (e.kind) {
    case EventKind::kCross:
      if (config.at(e.head) != kEmpty) {
        config.set(e.head, kEmpty);
        return true;
      }
      return false;
    case EventKind::kBirth1:
      if (config.at(e.tail) == kInhibitory && config.at(e.head) == kEmpty) {
        config.set(e.head, kInhibitory);
        return true;
      }
      return false;
    case EventKind::kBirth2:
      if (config.at(e.tail) == kSusceptible && config.at(e.head) == kEmpty) {
        config.set(e.head, kSusceptible);
        return true;
      }
      return false;
    case EventKind::kKill:
      if (config.at(e.tail) == kInhibitory &&
          config.at(e.head) == kSusceptible) {
        config.set(e.head, kEmpty);
        return true;
      }
      return false;
  }
  return false;
}

bool apply_event_symmetric(SpatialConfig& config, const GraphEvent& e) {
  switch (e.kind) {
    case EventKind::kCross:
      if (config.at(e.head) != kEmpty) {
        config.set(e.head, kEmpty);
        return true;
      }
      return false;
    case EventKind::kBirth1:
    case EventKind::kBirth2: {
      std::uint8_t tail = config.at(e.tail);
      if (tail != kEmpty && config.at(e.head) == kEmpty) {
        config.set(e.head, tail);
        return true;
      }
      return false;
    }
    case EventKind::kKill:
      throw ConfigError("symmetric replay requires a gamma = 0 log (no kill "
                        "arrows)");
  }
  return false;
}

namespace {

struct Sampler {
  const SampleSpec* spec;
  std::size_t next_time = 0;
  std::size_t next_snap = 0;
  ObservableSeries out;

  void record_up_to(double t, const SpatialConfig& config) {
    while (next_time < spec->times.size() && spec->times[next_time] <= t) {
      push(spec->times[next_time], config);
      ++next_time;
    }
    while (next_snap < spec->snapshot_times.size() &&
           spec->snapshot_times[next_snap] <= t) {
      out.snapshots.emplace_back(spec->snapshot_times[next_snap], config);
      ++next_snap;
    }
  }

  void push(double t, const SpatialConfig& config) {
    double n = static_cast<double>(config.n_sites());
    out.times.push_back(t);
    out.counts.push_back(config.counts);
    out.densities.push_back({config.counts[0] / n, config.counts[1] / n,
                             config.counts[2] / n});
  }

  void finish(double horizon, const SpatialConfig& config) {
    record_up_to(horizon, config);
    if (out.times.empty() || out.times.back() < horizon)
      push(horizon, config);
  }
};

template <typename Source>
SimResult run_events(const SpatialConfig& initial, Source&& next_event,
                     double horizon, const SampleSpec& samples,
                     bool symmetric) {
  SimResult res;
  SpatialConfig config = initial;
  Sampler sampler{&samples, 0, 0, {}};
  if (config.counts[kInhibitory] == 0) res.extinction_time1 = 0.0;
  if (config.counts[kSusceptible] == 0) res.extinction_time2 = 0.0;

  GraphEvent e;
  while (next_event(e)) {
    // samples record the state strictly before the next event time
    sampler.record_up_to(
        std::nextafter(e.time, -std::numeric_limits<double>::infinity()),
        config);
    bool changed = symmetric ? apply_event_symmetric(config, e)
                             : apply_event(config, e);
    if (changed) {
      if (config.counts[kInhibitory] == 0 && std::isnan(res.extinction_time1))
        res.extinction_time1 = e.time;
      if (config.counts[kSusceptible] == 0 && std::isnan(res.extinction_time2))
        res.extinction_time2 = e.time;
      // all-empty is absorbing: nothing later can change the state
      if (config.counts[kEmpty] == config.n_sites()) break;
    }
  }
  sampler.finish(horizon, config);

  res.series = std::move(sampler.out);
  res.final_config = std::move(config);
  long c1 = res.final_config.counts[kInhibitory];
  long c2 = res.final_config.counts[kSusceptible];
  if (c1 == 0 && c2 == 0)
    res.outcome = Outcome::kBothExtinct;
  else if (c2 == 0)
    res.outcome = Outcome::kSpecies1Wins;
  else if (c1 == 0)
    res.outcome = Outcome::kSpecies2Wins;
  else
    res.outcome = Outcome::kCoexistAtHorizon;
  return res;
}

}  // namespace

SimResult simulate(const SpatialConfig& initial, const ModelParams& params,
                   double horizon, std::uint64_t seed, std::uint64_t stream,
                   const SampleSpec& samples, bool record, long max_recorded) {
  params.validate();
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (initial.dim != params.dim || initial.side != params.side)
    throw ConfigError("initial configuration does not match params geometry");

  TorusGeometry geom(params.dim, params.side);
  NeighborhoodTemplate tmpl =
      build_neighborhood(params.dim, params.range, params.side);
  NeighborTable table = build_neighbor_table(geom, tmpl);
  EventStream src(geom, &table, standard_kinds(params), 0.0, horizon, seed,
                  stream);

  EventLog log;
  if (record) {
    log.horizon = horizon;
    log.seed = seed;
    log.stream = stream;
    log.params = params;
  }

  RawEvent raw;
  auto next = [&](GraphEvent& e) {
    if (!src.next(raw)) return false;
    e = {raw.time, static_cast<EventKind>(raw.kind), raw.tail, raw.head};
    if (record) {
      if (static_cast<long>(log.events.size()) >= max_recorded)
        throw ResourceCapError("recorded event log exceeds the configured cap");
      log.events.push_back(e);
    }
    return true;
  };

  SimResult res = run_events(initial, next, horizon, samples, false);
  if (record) res.log = std::move(log);
  return res;
}

SimResult replay(const SpatialConfig& initial, const EventLog& log,
                 const SampleSpec& samples, bool symmetric) {
  std::size_t i = 0;
  auto next = [&](GraphEvent& e) {
    if (i >= log.events.size()) return false;
    e = log.events[i++];
    return true;
  };
  return run_events(initial, next, log.horizon, samples, symmetric);
}

Outcome classify_outcome(const ObservableSeries& series) {
  if (series.counts.empty()) throw ConfigError("empty series");
  const auto& last = series.counts.back();
  long c1 = last[kInhibitory], c2 = last[kSusceptible];
  if (c1 == 0 && c2 == 0) return Outcome::kBothExtinct;
  if (c2 == 0) return Outcome::kSpecies1Wins;
  if (c1 == 0) return Outcome::kSpecies2Wins;
  return Outcome::kCoexistAtHorizon;
}

void write_density_csv(std::ostream& os, const ObservableSeries& series) {
  os << "t,rho0,rho1,rho2,count1,count2\n";
  char buf[160];
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%ld,%ld\n",
                  series.times[i], series.densities[i][0],
                  series.densities[i][1], series.densities[i][2],
                  series.counts[i][1], series.counts[i][2]);
    os << buf;
  }
}

void write_ppm(std::ostream& os, const SpatialConfig& config) {
  if (config.dim != 2) throw ConfigError("pixmap export requires d = 2");
  long L = config.side;
  os << "P6\n" << L << ' ' << L << "\n255\n";
  std::vector<unsigned char> row(3 * L);
  for (long y = 0; y < L; ++y) {
    for (long x = 0; x < L; ++x) {
      unsigned char v;
      switch (config.at(y * L + x)) {
        case kInhibitory: v = 0; break;
        case kSusceptible: v = 128; break;
        default: v = 255; break;
      }
      row[3 * x] = row[3 * x + 1] = row[3 * x + 2] = v;
    }
    os.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

}  // namespace allelo
